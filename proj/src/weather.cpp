#include "winterrisk/weather.hpp"

#include "winterrisk/csv.hpp"
#include "winterrisk/error.hpp"
#include "winterrisk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

namespace winterrisk::weather {

namespace {

constexpr double kHoursPerSeasonalCycle = 8760.0;

void normalize(std::vector<double>& w)
{
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
}

std::vector<double> assign_sites(std::span<const Site> sites, const GridSpec& grid)
{
    std::vector<double> w(grid.cells(), 0.0);
    for (const Site& s : sites) {
        if (!std::isfinite(s.weight) || s.weight < 0.0)
            throw InputError(fmt::format("site ({}, {}) has invalid weight {}", s.lat, s.lon, s.weight));
        if (!grid.contains(s.lat, s.lon))
            throw InputError(fmt::format("site ({}, {}) lies outside the grid", s.lat, s.lon));
        w[grid.nearest_cell(s.lat, s.lon)] += s.weight;
    }
    return w;
}

WeightMap make_map(std::vector<double> w, const GridSpec& grid, std::string label)
{
    if (std::none_of(w.begin(), w.end(), [](double x) { return x > 0.0; }))
        throw InputError(fmt::format("weight map '{}' has no positive weight", label));
    normalize(w);
    return WeightMap{grid, std::move(w), std::move(label)};
}

/// Cosine taper that is 1 on the middle half of a window of `length` hours.
double spell_weight(int k, int length)
{
    const double x = (static_cast<double>(k) + 0.5) / static_cast<double>(length);
    constexpr double ramp = 0.25;
    if (x < ramp) return 0.5 * (1.0 - std::cos(std::numbers::pi * x / ramp));
    if (x > 1.0 - ramp) return 0.5 * (1.0 - std::cos(std::numbers::pi * (1.0 - x) / ramp));
    return 1.0;
}

}  // namespace

bool GridSpec::contains(double la, double lo) const
{
    const double lat_lo = lat0 - 0.5 * dlat;
    const double lat_hi = lat(nlat - 1) + 0.5 * dlat;
    const double lon_lo = lon0 - 0.5 * dlon;
    const double lon_hi = lon(nlon - 1) + 0.5 * dlon;
    return la >= lat_lo && la <= lat_hi && lo >= lon_lo && lo <= lon_hi;
}

std::size_t GridSpec::nearest_cell(double la, double lo) const
{
    auto nearest = [](double v, double origin, double step, std::size_t n) {
        const double idx = std::round((v - origin) / step);
        return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(n - 1)));
    };
    return nearest(la, lat0, dlat, nlat) * nlon + nearest(lo, lon0, dlon, nlon);
}

TemperatureField::TemperatureField(GridSpec grid, std::vector<HourStamp> timestamps, std::vector<double> values)
    : grid_(grid), timestamps_(std::move(timestamps)), values_(std::move(values))
{
    if (grid_.cells() == 0 || !(grid_.dlat > 0.0) || !(grid_.dlon > 0.0))
        throw InputError("temperature field needs a non-empty grid with positive spacing");
    if (timestamps_.empty()) throw InputError("temperature field has no timestamps");
    for (std::size_t t = 1; t < timestamps_.size(); ++t) {
        if (timestamps_[t] - timestamps_[t - 1] != 1)
            throw InputError(fmt::format("temperature field is not hourly-contiguous at {}",
                                         format_timestamp(timestamps_[t])));
    }
    if (values_.size() != timestamps_.size() * grid_.cells())
        throw InputError("temperature field does not cover every cell at every hour");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!(v >= kMinPhysicalTemp && v <= kMaxPhysicalTemp))
            throw InputError(fmt::format("temperature {} at {} outside [-60, 60] degC", v,
                                         format_timestamp(timestamps_[i / grid_.cells()])));
    }
}

WeightMap build_weight_map(std::span<const Site> sites, const GridSpec& grid, std::string label)
{
    if (sites.empty()) throw InputError("site list is empty");
    return make_map(assign_sites(sites, grid), grid, std::move(label));
}

SplitWeightMaps build_split_weight_maps(std::span<const Site> sites, const GridSpec& grid, double split_lat,
                                        const std::string& label)
{
    if (sites.empty()) throw InputError("site list is empty");
    std::vector<Site> south;
    std::vector<Site> north;
    for (const Site& s : sites) (s.lat < split_lat ? south : north).push_back(s);
    return SplitWeightMaps{make_map(assign_sites(south, grid), grid, label + "-south"),
                           make_map(assign_sites(north, grid), grid, label + "-north")};
}

WeightedTemperatureSeries weighted_index(const TemperatureField& field, const WeightMap& map)
{
    if (!(map.grid == field.grid()) || map.weights.size() != field.grid().cells())
        throw InputError(fmt::format("weight map '{}' does not match the field grid", map.label));
    WeightedTemperatureSeries out;
    out.basis = map.label;
    out.timestamps = field.timestamps();
    out.values.resize(field.hours());
    for (std::size_t t = 0; t < field.hours(); ++t) {
        const auto row = field.hour(t);
        double acc = 0.0;
        double lo = row[0];
        double hi = row[0];
        for (std::size_t c = 0; c < row.size(); ++c) {
            acc += map.weights[c] * row[c];
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        // rounding in the weighted sum must not leave the hourly range
        out.values[t] = std::clamp(acc, lo, hi);
    }
    return out;
}

WeightedTemperatureSeries apply_trend(const WeightedTemperatureSeries& series, double slope_per_year, int y_ref)
{
    if (!std::isfinite(slope_per_year)) throw InputError("trend slope must be finite");
    if (y_ref < 1900 || y_ref > 2100) throw InputError(fmt::format("reference year {} outside [1900, 2100]", y_ref));
    WeightedTemperatureSeries out = series;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const int y = calendar_year(out.timestamps[i]);
        out.values[i] += slope_per_year * static_cast<double>(y_ref - y);
    }
    return out;
}

TemperatureField synth_weather(std::uint64_t seed, int years, const ClimateProfile& p,
                               std::span<const ColdSpell> spells)
{
    if (years < 1) throw InputError("synthetic weather needs at least one year");
    const HourStamp first = to_stamp({p.start_year, 1, 1, 0});
    const HourStamp end = to_stamp({p.start_year + years, 1, 1, 0});
    const auto n = static_cast<std::size_t>(end - first);
    const std::size_t cells = p.grid.cells();
    const double centre_lat = p.grid.lat0 + 0.5 * static_cast<double>(p.grid.nlat - 1) * p.grid.dlat;

    std::vector<HourStamp> stamps(n);
    std::vector<double> values(n * cells);

    rng::Stream shared(seed, 0);
    const double innovation = p.noise_sigma_c * std::sqrt(std::max(0.0, 1.0 - p.noise_ar1 * p.noise_ar1));
    double anomaly = p.noise_sigma_c * shared.normal();

    std::vector<rng::Stream> jitter;
    jitter.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c) jitter.emplace_back(seed, 1 + c);

    for (std::size_t t = 0; t < n; ++t) {
        const HourStamp s = first + static_cast<std::int64_t>(t);
        stamps[t] = s;
        if (t > 0) anomaly = p.noise_ar1 * anomaly + innovation * shared.normal();
        const double hoy = std::min(hour_of_year(s), 8760);
        const double hod = static_cast<double>(to_civil(s).hour);
        const double seasonal =
            -p.seasonal_amplitude_c *
            std::cos(2.0 * std::numbers::pi * (hoy - p.coldest_hour_of_year) / kHoursPerSeasonalCycle);
        const double diurnal =
            -p.diurnal_amplitude_c * std::cos(2.0 * std::numbers::pi * (hod - p.coldest_hour_of_day) / 24.0);
        for (std::size_t c = 0; c < cells; ++c) {
            double v = p.annual_mean_c + seasonal + diurnal + anomaly +
                       p.lat_gradient_c_per_deg * (p.grid.cell_lat(c) - centre_lat) +
                       p.cell_noise_sigma_c * jitter[c].normal();
            if (!std::isnan(p.floor_c)) v = std::max(v, p.floor_c);
            values[t * cells + c] = v;
        }
    }

    for (const ColdSpell& spell : spells) {
        if (spell.length_hours < 1) throw InputError("cold spell length must be at least 1 h");
        if (spell.year < p.start_year || spell.year >= p.start_year + years || spell.start_hour < 0)
            throw InputError(fmt::format("cold spell in {} lies outside the simulated span", spell.year));
        const HourStamp start = to_stamp({spell.year, 1, 1, 0}) + spell.start_hour;
        const std::int64_t offset = start - first;
        if (offset + spell.length_hours > static_cast<std::int64_t>(n))
            throw InputError(fmt::format("cold spell in {} runs past the simulated span", spell.year));
        for (int k = 0; k < spell.length_hours; ++k) {
            const double w = spell_weight(k, spell.length_hours);
            const auto t = static_cast<std::size_t>(offset + k);
            for (std::size_t c = 0; c < cells; ++c) {
                double& v = values[t * cells + c];
                v = (1.0 - w) * v + w * spell.depth_c;
            }
        }
    }
    return TemperatureField(p.grid, std::move(stamps), std::move(values));
}

TemperatureField read_field_csv(const std::filesystem::path& path, const UtcOffsetTable& offsets)
{
    const auto table = csv::Table::read(path);
    const auto c_ts = table.column("timestamp");
    const auto c_lat = table.column("lat");
    const auto c_lon = table.column("lon");
    const auto c_temp = table.column("temp_c");
    if (table.empty()) throw InputError(fmt::format("{}: no data rows", table.source()));

    struct Obs {
        HourStamp t;
        double lat, lon, temp;
        const csv::Table::Row* row;
    };
    std::vector<Obs> obs;
    obs.reserve(table.rows().size());
    std::vector<double> lats, lons;
    std::vector<HourStamp> stamps;
    for (const auto& row : table.rows()) {
        Obs o{HourStamp{}, table.number(row, c_lat), table.number(row, c_lon), table.number(row, c_temp), &row};
        try {
            o.t = parse_timestamp(table.text(row, c_ts), offsets);
        } catch (const InputError& e) {
            throw InputError(table.where(row) + e.what());
        }
        lats.push_back(o.lat);
        lons.push_back(o.lon);
        stamps.push_back(o.t);
        obs.push_back(o);
    }
    auto uniq = [](auto& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(lats);
    uniq(lons);
    uniq(stamps);

    auto spacing = [&](const std::vector<double>& v, const char* what) {
        if (v.size() < 2) return 1.0;
        const double step = v[1] - v[0];
        for (std::size_t i = 2; i < v.size(); ++i)
            if (std::abs((v[i] - v[i - 1]) - step) > 1e-6 * std::max(1.0, std::abs(step)))
                throw InputError(fmt::format("{}: {} values are not evenly spaced", table.source(), what));
        return step;
    };
    GridSpec grid{lats.front(), lons.front(), spacing(lats, "lat"), spacing(lons, "lon"), lats.size(), lons.size()};

    std::vector<double> values(stamps.size() * grid.cells(), std::numeric_limits<double>::quiet_NaN());
    for (const Obs& o : obs) {
        const auto t = static_cast<std::size_t>(std::lower_bound(stamps.begin(), stamps.end(), o.t) - stamps.begin());
        const std::size_t cell = grid.nearest_cell(o.lat, o.lon);
        double& slot = values[t * grid.cells() + cell];
        if (!std::isnan(slot))
            throw InputError(table.where(*o.row) + "duplicate (timestamp, lat, lon)");
        slot = o.temp;
    }
    for (std::size_t i = 0; i < values.size(); ++i)
        if (std::isnan(values[i]))
            throw InputError(fmt::format("{}: no value for cell ({}, {}) at {}", table.source(),
                                         grid.cell_lat(i % grid.cells()), grid.cell_lon(i % grid.cells()),
                                         format_timestamp(stamps[i / grid.cells()])));
    return TemperatureField(grid, std::move(stamps), std::move(values));
}

void write_field_csv(const std::filesystem::path& path, const TemperatureField& field)
{
    std::string out = "timestamp,lat,lon,temp_c\n";
    const auto& g = field.grid();
    for (std::size_t t = 0; t < field.hours(); ++t) {
        const std::string ts = format_timestamp(field.timestamps()[t]);
        for (std::size_t c = 0; c < g.cells(); ++c)
            out += fmt::format("{},{},{},{}\n", ts, csv::num(g.cell_lat(c), 4), csv::num(g.cell_lon(c), 4),
                               csv::num(field.value(t, c), 4));
    }
    csv::write_file(path, out);
}

std::vector<Site> read_sites_csv(const std::filesystem::path& path)
{
    const auto table = csv::Table::read(path);
    const auto c_lat = table.column("lat");
    const auto c_lon = table.column("lon");
    const auto c_w = table.column("weight");
    const auto c_label = table.column("label");
    std::vector<Site> sites;
    for (const auto& row : table.rows())
        sites.push_back(Site{table.number(row, c_lat), table.number(row, c_lon), table.number(row, c_w),
                             table.text(row, c_label)});
    if (sites.empty()) throw InputError(fmt::format("{}: site list is empty", table.source()));
    return sites;
}

WeightedTemperatureSeries read_series_csv(const std::filesystem::path& path, const std::string& value_column,
                                          const UtcOffsetTable& offsets)
{
    const auto table = csv::Table::read(path);
    const auto c_ts = table.column("timestamp");
    const auto c_v = table.column(value_column);
    WeightedTemperatureSeries s;
    s.basis = path.stem().string();
    for (const auto& row : table.rows()) {
        HourStamp t;
        try {
            t = parse_timestamp(table.text(row, c_ts), offsets);
        } catch (const InputError& e) {
            throw InputError(table.where(row) + e.what());
        }
        if (!s.timestamps.empty() && t <= s.timestamps.back())
            throw InputError(table.where(row) + "timestamps must be strictly increasing");
        s.timestamps.push_back(t);
        s.values.push_back(table.number(row, c_v));
    }
    return s;
}

void write_series_csv(const std::filesystem::path& path, const WeightedTemperatureSeries& series,
                      const std::string& value_column)
{
    std::string out = "timestamp," + value_column + "\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out += format_timestamp(series.timestamps[i]) + "," + csv::num(series.values[i], 6) + "\n";
    csv::write_file(path, out);
}

}  // namespace winterrisk::weather
