#pragma once

#include "winterrisk/weather.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace winterrisk::outage {

enum class Technology { Gas, Coal, WindNorth, WindSouth };

inline constexpr Technology kAllTechnologies[] = {Technology::Gas, Technology::Coal, Technology::WindNorth,
                                                  Technology::WindSouth};

std::string_view to_string(Technology t);
/// "gas", "coal", "wind-north", "wind-south"; throws InputError otherwise.
Technology parse_technology(std::string_view s);
bool is_wind(Technology t);

/// Four-segment temperature-triggered outage function of one technology.
///
/// Simulation emits only the weather-driven part: 0 until the plant-weighted
/// temperature drops below `onset_temp_c`, `plateau_gw` while in full
/// outage, then a linear decline of `recovery_slope_gw_per_h` per hour back
/// to 0. The pre- and post-event baselines are kept for reference only.
struct OutageModel {
    Technology technology = Technology::Gas;
    double onset_temp_c = -8.8;
    double plateau_gw = 0.0;
    double recovery_temp_c = 0.0;
    double recovery_slope_gw_per_h = 1.0;
    int min_full_hours = 10;
    double baseline_pre_gw = 0.0;
    double baseline_post_gw = 0.0;

    /// Throws InputError if an invariant is violated.
    void validate() const;
};

struct OutageEpisode {
    std::vector<double> outage_gw;
    std::vector<double> temps_c;  // plant-weighted, aligned with outage_gw
    Technology technology = Technology::Gas;
};

struct FitOptions {
    double recovery_temp_c = 0.0;
    int min_full_hours = 10;
    int tail_points = 10;
};

/// Estimates the outage function from one observed episode.
///
/// Onset is the hour with the largest hour-over-hour increase (earliest on
/// ties). The plateau runs from there to the first hour warmer than the
/// recovery temperature, ignoring the first `min_full_hours` hours; its level
/// matches the observed outage area over that span. The recovery slope comes
/// from a least-squares fit of a falling line followed by a constant tail
/// (mean of the last `tail_points` observations), with the breakpoint found
/// by exhaustive search. Throws InputError / NumericError.
OutageModel fit_outage_model(const OutageEpisode& episode, const FitOptions& options = {});

/// Hourly outage (GW) for a contiguous temperature series.
std::vector<double> simulate_outages(const OutageModel& model, std::span<const double> temps_c);

OutageModel shift_thresholds(const OutageModel& model, double d_onset_c, double d_recovery_c);

void write_model(const std::filesystem::path& path, const OutageModel& model);
OutageModel read_model(const std::filesystem::path& path);

/// `timestamp, tech, outage_gw` rows for one technology joined to a
/// `timestamp, temp_c` series; the joined hours must be contiguous.
OutageEpisode read_episode(const std::filesystem::path& outages_csv, const weather::WeightedTemperatureSeries& temps,
                           Technology technology, const UtcOffsetTable& offsets = {});

/// Observed hourly outages per technology, from `timestamp, tech, outage_gw`.
using ObservedOutages = std::map<Technology, std::map<HourStamp, double>>;
ObservedOutages read_observed_outages(const std::filesystem::path& outages_csv, const UtcOffsetTable& offsets = {});

}  // namespace winterrisk::outage
