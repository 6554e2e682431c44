#pragma once

#include "winterrisk/deficit.hpp"
#include "winterrisk/economics.hpp"
#include "winterrisk/load_model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace winterrisk::cli {

inline constexpr std::uint64_t kDefaultSeed = 20210215;

/// Scenario configuration. Relative paths are resolved against the
/// directory holding the config file.
///
///   [system]    c_thermal_gw, c_wind_gw, voll, wind_capacity_factor
///   [models]    load, gas, coal, wind-north, wind-south
///   [inputs]    population, gas, coal, wind-north, wind-south,
///               wind_generation (optional), holidays (optional),
///               observed_outages (optional, timestamp,tech,outage_gw)
///   [time]      utc_offset_hours
///   [winterize] <tech> = GW
///   [costs]     any CostInputs field by name
struct Config {
    std::filesystem::path path;
    deficit::SystemConfig system;
    double wind_capacity_factor = 0.3;
    std::filesystem::path load_model;
    std::map<outage::Technology, std::filesystem::path> outage_models;
    std::filesystem::path population;
    std::map<outage::Technology, std::filesystem::path> plant_series;
    std::optional<std::filesystem::path> wind_generation;
    std::optional<std::filesystem::path> holidays;
    std::optional<std::filesystem::path> observed_outages;
    int utc_offset_hours = -6;
    std::vector<deficit::WinterizationScenario> winterize;
    economics::CostInputs costs;

    /// Every file the config reads, in a fixed order.
    std::vector<std::filesystem::path> input_files() const;
};

Config read_config(const std::filesystem::path& path);

struct Trend {
    double slope_per_year = 0.0;
    int y_ref = 2021;
};

/// Loads series and models named by the config; applies the trend to every
/// temperature series when given.
struct Inputs {
    deficit::WeatherInputs weather;
    load::LoadModel load_model;
    load::HolidaySet holidays;
};
Inputs load_inputs(const Config& cfg, const std::optional<Trend>& trend = {});

/// "tech=GW"
deficit::WinterizationScenario parse_winterize(const std::string& text);
/// "slope,y_ref"
Trend parse_trend(const std::string& text);

/// 64-bit FNV-1a over the bytes of each file in turn.
std::uint64_t content_hash(std::span<const std::filesystem::path> files);

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 success, 2 input error, 3 numeric failure.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace winterrisk::cli
