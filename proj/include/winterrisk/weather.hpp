#pragma once

#include "winterrisk/time.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace winterrisk::weather {

inline constexpr double kMinPhysicalTemp = -60.0;
inline constexpr double kMaxPhysicalTemp = 60.0;

/// Rectangular lat/lon lattice of cell centres. Cell (i, j) sits at
/// (lat0 + i*dlat, lon0 + j*dlon) and has flat index i*nlon + j.
struct GridSpec {
    double lat0 = 0.0;
    double lon0 = 0.0;
    double dlat = 1.0;
    double dlon = 1.0;
    std::size_t nlat = 1;
    std::size_t nlon = 1;

    std::size_t cells() const { return nlat * nlon; }
    double lat(std::size_t i) const { return lat0 + static_cast<double>(i) * dlat; }
    double lon(std::size_t j) const { return lon0 + static_cast<double>(j) * dlon; }
    double cell_lat(std::size_t cell) const { return lat(cell / nlon); }
    double cell_lon(std::size_t cell) const { return lon(cell % nlon); }

    /// Cell centres plus half a cell on every side.
    bool contains(double lat, double lon) const;
    std::size_t nearest_cell(double lat, double lon) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Hourly temperatures (°C) on a grid. Values are stored hour-major:
/// value(t, cell) = values[t * cells + cell].
class TemperatureField {
public:
    /// Validates: step of exactly one hour, full coverage, values in
    /// [-60, 60] °C. Throws InputError.
    TemperatureField(GridSpec grid, std::vector<HourStamp> timestamps, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    const std::vector<HourStamp>& timestamps() const { return timestamps_; }
    std::size_t hours() const { return timestamps_.size(); }
    std::span<const double> hour(std::size_t t) const
    {
        return {values_.data() + t * grid_.cells(), grid_.cells()};
    }
    double value(std::size_t t, std::size_t cell) const { return values_[t * grid_.cells() + cell]; }
    const std::vector<double>& values() const { return values_; }

private:
    GridSpec grid_;
    std::vector<HourStamp> timestamps_;
    std::vector<double> values_;
};

struct WeightMap {
    GridSpec grid;
    std::vector<double> weights;  // normalized, sums to 1
    std::string label;
};

/// Hourly index series. Also used for any aligned hourly quantity read
/// from a `timestamp, <value>` CSV.
struct WeightedTemperatureSeries {
    std::vector<HourStamp> timestamps;
    std::vector<double> values;
    std::string basis;

    std::size_t size() const { return values.size(); }
};

struct Site {
    double lat = 0.0;
    double lon = 0.0;
    double weight = 0.0;
    std::string label;
};

WeightMap build_weight_map(std::span<const Site> sites, const GridSpec& grid, std::string label);

struct SplitWeightMaps {
    WeightMap south;  // lat < split
    WeightMap north;  // lat >= split
};

/// Partitions sites at `split_lat` and normalizes each side independently.
/// Labels become "<label>-south" and "<label>-north".
SplitWeightMaps build_split_weight_maps(std::span<const Site> sites, const GridSpec& grid,
                                        double split_lat, const std::string& label);

WeightedTemperatureSeries weighted_index(const TemperatureField& field, const WeightMap& map);

/// t + slope * (y_ref - y) for every hour of calendar year y.
WeightedTemperatureSeries apply_trend(const WeightedTemperatureSeries& series, double slope_per_year,
                                      int y_ref);

struct ClimateProfile {
    int start_year = 1950;
    GridSpec grid{26.0, -104.0, 3.0, 4.0, 3, 3};
    double annual_mean_c = 20.0;
    double seasonal_amplitude_c = 9.0;
    int coldest_hour_of_year = 400;  // mid January
    double diurnal_amplitude_c = 5.0;
    int coldest_hour_of_day = 6;
    double noise_sigma_c = 3.0;
    double noise_ar1 = 0.97;           // hourly persistence of the shared anomaly
    double cell_noise_sigma_c = 0.5;   // independent per-cell jitter
    double lat_gradient_c_per_deg = -0.8;
    /// Baseline temperatures are clamped at this value before spells are
    /// injected; NaN disables the floor.
    double floor_c = std::numeric_limits<double>::quiet_NaN();
};

struct ColdSpell {
    int year = 0;
    int start_hour = 0;  // 0-based hour within `year`
    double depth_c = -10.0;
    int length_hours = 72;
};

/// Sinusoidal seasonal and diurnal cycle with AR(1) anomalies on a small
/// grid; spells pull every cell towards `depth_c` with a cosine-tapered
/// weight that is 1 on the middle half of the spell. Full calendar years
/// from `profile.start_year`.
TemperatureField synth_weather(std::uint64_t seed, int years, const ClimateProfile& profile,
                               std::span<const ColdSpell> spells);

// CSV interfaces

/// `timestamp, lat, lon, temp_c`
TemperatureField read_field_csv(const std::filesystem::path& path, const UtcOffsetTable& offsets = {});
void write_field_csv(const std::filesystem::path& path, const TemperatureField& field);

/// `lat, lon, weight, label`
std::vector<Site> read_sites_csv(const std::filesystem::path& path);

/// `timestamp, <value_column>`; timestamps must be strictly increasing.
WeightedTemperatureSeries read_series_csv(const std::filesystem::path& path,
                                          const std::string& value_column = "temp_c",
                                          const UtcOffsetTable& offsets = {});
void write_series_csv(const std::filesystem::path& path, const WeightedTemperatureSeries& series,
                      const std::string& value_column = "temp_c");

}  // namespace winterrisk::weather
