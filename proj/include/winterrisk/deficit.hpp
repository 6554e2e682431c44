#pragma once

#include "winterrisk/load_model.hpp"
#include "winterrisk/outage_model.hpp"
#include "winterrisk/weather.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace winterrisk::deficit {

using outage::OutageModel;
using outage::Technology;

struct SystemConfig {
    double c_thermal_gw = 62.0;
    double c_wind_gw = 35.0;
    double voll_usd_per_mwh = 9000.0;
    std::map<Technology, OutageModel> models;

    void validate() const;
};

/// Hourly outages per technology. Wind North and South are summed into the
/// wind term.
using OutageSeries = std::map<Technology, std::vector<double>>;

/// c = c_thermal - o_gas - o_coal + w * (c_wind - o_wind) / c_wind
std::vector<double> available_capacity(const SystemConfig& cfg, const OutageSeries& outages,
                                       std::span<const double> wind_gen_gw);

struct AnnualDeficit {
    int year = 0;
    double total_gwh = 0.0;
    double peak_gw = 0.0;
    int deficit_hours = 0;  // hours with demand >= capacity
};

/// Hourly deficits d = demand - capacity (negative = surplus) and totals per
/// winter season.
struct DeficitSeries {
    std::vector<HourStamp> timestamps;
    std::vector<double> deficit_gw;
    std::vector<AnnualDeficit> annual;  // ascending by year

    double lost_load_gw(std::size_t i) const { return deficit_gw[i] > 0.0 ? deficit_gw[i] : 0.0; }
    double total_gwh() const;
};

/// Annual totals follow the event-year of each timestamp.
DeficitSeries capacity_deficit(std::span<const HourStamp> timestamps, std::span<const double> demand_gw,
                               std::span<const double> capacity_gw);

struct WinterizationScenario {
    Technology technology = Technology::Gas;
    double winterized_gw = 0.0;
};

/// Lowers the technology's plateau by the winterized capacity, floored at 0.
SystemConfig apply_winterization(const SystemConfig& cfg, const WinterizationScenario& scenario);

/// Every weather input of a simulation, aligned hour by hour.
struct WeatherInputs {
    weather::WeightedTemperatureSeries population;
    std::map<Technology, weather::WeightedTemperatureSeries> plant_temps;
    std::vector<double> wind_gen_gw;
    /// Where present, replaces the simulated outage of a technology hour by
    /// hour. Winterization does not alter observed values.
    outage::ObservedOutages observed_outages_gw;
};

struct RunOptions {
    unsigned threads = 1;
    /// Keep only seasons holding every December, January and February hour.
    bool complete_seasons_only = true;
};

struct RunResult {
    DeficitSeries deficits;             // winter hours of every simulated season
    std::vector<double> demand_gw;      // aligned with deficits.timestamps
    std::vector<double> capacity_gw;
    std::vector<double> population_temp_c;
};

/// Simulates every winter season independently: demand from the load model
/// on the population index, outages per technology on its own index, then
/// deficits. Seasons run concurrently and are merged in year order.
RunResult run_years(const SystemConfig& cfg, const WeatherInputs& inputs, const load::LoadModel& load_model,
                    const load::HolidaySet& holidays, std::span<const WinterizationScenario> scenarios = {},
                    const RunOptions& options = {});

enum class SweepScope { GasOnly, AllTechnologies };

struct SweepPoint {
    double d_onset_c = 0.0;
    double d_recovery_c = 0.0;
    double total_gwh = 0.0;
    std::vector<AnnualDeficit> annual;
};

std::vector<SweepPoint> sensitivity_sweep(const SystemConfig& cfg, const WeatherInputs& inputs,
                                          const load::LoadModel& load_model, const load::HolidaySet& holidays,
                                          std::span<const double> deltas_onset, std::span<const double> deltas_recovery,
                                          SweepScope scope, const RunOptions& options = {});

}  // namespace winterrisk::deficit
