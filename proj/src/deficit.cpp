#include "winterrisk/deficit.hpp"

#include "winterrisk/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

namespace winterrisk::deficit {

void SystemConfig::validate() const
{
    if (!(c_thermal_gw > 0.0)) throw InputError("thermal capacity must be > 0");
    if (!(c_wind_gw > 0.0)) throw InputError("wind capacity must be > 0");
    if (!(voll_usd_per_mwh > 0.0)) throw InputError("value of lost load must be > 0");
    for (const auto& [tech, m] : models) {
        if (m.technology != tech)
            throw InputError(fmt::format("model registered as {} describes {}", outage::to_string(tech),
                                         outage::to_string(m.technology)));
        m.validate();
    }
}

std::vector<double> available_capacity(const SystemConfig& cfg, const OutageSeries& outages,
                                       std::span<const double> wind_gen_gw)
{
    const std::size_t n = wind_gen_gw.size();
    for (const auto& [tech, series] : outages) {
        if (series.size() != n)
            throw InputError(fmt::format("{} outages have {} hours but wind generation has {}",
                                         outage::to_string(tech), series.size(), n));
    }
    auto at = [&](Technology t, std::size_t i) {
        const auto it = outages.find(t);
        return it == outages.end() ? 0.0 : it->second[i];
    };
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double o_wind = at(Technology::WindNorth, i) + at(Technology::WindSouth, i);
        if (o_wind > cfg.c_wind_gw)
            throw InputError(fmt::format("wind outage {} GW exceeds installed wind capacity {} GW at hour {}", o_wind,
                                         cfg.c_wind_gw, i));
        c[i] = cfg.c_thermal_gw - at(Technology::Gas, i) - at(Technology::Coal, i) +
               wind_gen_gw[i] * (cfg.c_wind_gw - o_wind) / cfg.c_wind_gw;
    }
    return c;
}

double DeficitSeries::total_gwh() const
{
    double s = 0.0;
    for (const auto& a : annual) s += a.total_gwh;
    return s;
}

DeficitSeries capacity_deficit(std::span<const HourStamp> timestamps, std::span<const double> demand_gw,
                               std::span<const double> capacity_gw)
{
    if (demand_gw.size() != capacity_gw.size() || demand_gw.size() != timestamps.size())
        throw InputError(fmt::format("deficit: {} timestamps, {} demand values, {} capacity values", timestamps.size(),
                                     demand_gw.size(), capacity_gw.size()));
    DeficitSeries out;
    out.timestamps.assign(timestamps.begin(), timestamps.end());
    out.deficit_gw.resize(demand_gw.size());
    for (std::size_t i = 0; i < demand_gw.size(); ++i) {
        if (i > 0 && !(timestamps[i - 1] < timestamps[i]))
            throw InputError("deficit: timestamps must be strictly increasing");
        const double d = demand_gw[i] - capacity_gw[i];
        out.deficit_gw[i] = d;
        const int y = event_year(timestamps[i]);
        if (out.annual.empty() || out.annual.back().year != y) out.annual.push_back(AnnualDeficit{y});
        AnnualDeficit& a = out.annual.back();
        if (demand_gw[i] >= capacity_gw[i]) {
            a.total_gwh += d;  // one hour at d GW
            a.peak_gw = std::max(a.peak_gw, d);
            ++a.deficit_hours;
        }
    }
    return out;
}

SystemConfig apply_winterization(const SystemConfig& cfg, const WinterizationScenario& s)
{
    if (!(s.winterized_gw >= 0.0) || !std::isfinite(s.winterized_gw))
        throw InputError("winterized capacity must be finite and >= 0");
    const auto it = cfg.models.find(s.technology);
    if (it == cfg.models.end())
        throw InputError(fmt::format("no outage model configured for {}", outage::to_string(s.technology)));
    SystemConfig out = cfg;
    double& plateau = out.models.at(s.technology).plateau_gw;
    plateau = std::max(0.0, plateau - s.winterized_gw);
    return out;
}

namespace {

struct Season {
    int year = 0;
    std::size_t begin = 0;  // index range in the full input series
    std::size_t end = 0;
};

struct SeasonResult {
    std::vector<double> demand;
    std::vector<double> capacity;
};

void check_alignment(const SystemConfig& cfg, const WeatherInputs& in)
{
    const auto& ts = in.population.timestamps;
    if (ts.empty()) throw InputError("population temperature series is empty");
    if (in.population.values.size() != ts.size()) throw InputError("population series values/timestamps differ");
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (!(ts[i - 1] < ts[i])) throw InputError("population series timestamps must be strictly increasing");
    for (const auto& [tech, model] : cfg.models) {
        const auto it = in.plant_temps.find(tech);
        if (it == in.plant_temps.end())
            throw InputError(fmt::format("no weighted temperature series for {}", outage::to_string(tech)));
        if (it->second.timestamps != ts || it->second.values.size() != ts.size())
            throw InputError(fmt::format("{} temperature series does not span the same hours as the population series",
                                         outage::to_string(tech)));
    }
    for (const auto& [tech, hours] : in.observed_outages_gw) {
        if (!cfg.models.contains(tech))
            throw InputError(fmt::format("observed outages for {} but no outage model", outage::to_string(tech)));
        for (const auto& [t, o] : hours)
            if (!(o >= 0.0) || !std::isfinite(o))
                throw InputError(fmt::format("observed {} outage at {} must be finite and >= 0",
                                             outage::to_string(tech), format_timestamp(t)));
    }
    if (in.wind_gen_gw.size() != ts.size())
        throw InputError(fmt::format("wind generation has {} hours, temperatures have {}", in.wind_gen_gw.size(),
                                     ts.size()));
    for (double w : in.wind_gen_gw)
        if (!(w >= 0.0) || w > cfg.c_wind_gw)
            throw InputError(fmt::format("wind generation {} GW outside [0, {}] GW", w, cfg.c_wind_gw));
}

std::vector<Season> find_seasons(std::span<const HourStamp> ts, bool complete_only)
{
    std::vector<Season> seasons;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!is_winter(ts[i])) continue;
        const int y = event_year(ts[i]);
        const bool extends = !seasons.empty() && seasons.back().year == y && seasons.back().end == i &&
                             ts[i] - ts[i - 1] == 1;
        if (extends) {
            seasons.back().end = i + 1;
        } else {
            if (!seasons.empty() && seasons.back().year == y)
                throw InputError(fmt::format("winter {} is not hourly-contiguous", y));
            seasons.push_back(Season{y, i, i + 1});
        }
    }
    if (complete_only) {
        std::erase_if(seasons, [&](const Season& s) {
            const auto expected = to_stamp({s.year, 3, 1, 0}) - to_stamp({s.year - 1, 12, 1, 0});
            return static_cast<std::int64_t>(s.end - s.begin) != expected;
        });
    }
    return seasons;
}

SeasonResult simulate_season(const SystemConfig& cfg, const WeatherInputs& in, const load::LoadModel& lm,
                             const load::HolidaySet& holidays, const Season& s)
{
    const auto n = s.end - s.begin;
    const std::span<const HourStamp> ts(in.population.timestamps.data() + s.begin, n);
    const std::span<const double> pop(in.population.values.data() + s.begin, n);
    SeasonResult r;
    r.demand = load::predict(lm, load::build_design(ts, pop, holidays, lm.temp_power));
    OutageSeries outages;
    for (const auto& [tech, model] : cfg.models) {
        const auto& temps = in.plant_temps.at(tech).values;
        auto o = outage::simulate_outages(model, std::span<const double>(temps.data() + s.begin, n));
        if (const auto obs = in.observed_outages_gw.find(tech); obs != in.observed_outages_gw.end())
            for (std::size_t k = 0; k < n; ++k)
                if (const auto it = obs->second.find(ts[k]); it != obs->second.end()) o[k] = it->second;
        outages.emplace(tech, std::move(o));
    }
    r.capacity = available_capacity(cfg, outages, std::span<const double>(in.wind_gen_gw.data() + s.begin, n));
    return r;
}

}  // namespace

RunResult run_years(const SystemConfig& base_cfg, const WeatherInputs& inputs, const load::LoadModel& load_model,
                    const load::HolidaySet& holidays, std::span<const WinterizationScenario> scenarios,
                    const RunOptions& options)
{
    base_cfg.validate();
    SystemConfig cfg = base_cfg;
    for (const auto& s : scenarios) cfg = apply_winterization(cfg, s);
    check_alignment(cfg, inputs);

    const auto seasons = find_seasons(inputs.population.timestamps, options.complete_seasons_only);
    std::vector<SeasonResult> results(seasons.size());

    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(seasons.size())));
    if (threads <= 1) {
        for (std::size_t k = 0; k < seasons.size(); ++k)
            results[k] = simulate_season(cfg, inputs, load_model, holidays, seasons[k]);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < seasons.size() && !failed; k = next++) {
                    try {
                        results[k] = simulate_season(cfg, inputs, load_model, holidays, seasons[k]);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }

    RunResult out;
    std::vector<HourStamp> stamps;
    for (std::size_t k = 0; k < seasons.size(); ++k) {
        const auto& s = seasons[k];
        stamps.insert(stamps.end(), inputs.population.timestamps.begin() + static_cast<std::ptrdiff_t>(s.begin),
                      inputs.population.timestamps.begin() + static_cast<std::ptrdiff_t>(s.end));
        out.population_temp_c.insert(out.population_temp_c.end(),
                                     inputs.population.values.begin() + static_cast<std::ptrdiff_t>(s.begin),
                                     inputs.population.values.begin() + static_cast<std::ptrdiff_t>(s.end));
        out.demand_gw.insert(out.demand_gw.end(), results[k].demand.begin(), results[k].demand.end());
        out.capacity_gw.insert(out.capacity_gw.end(), results[k].capacity.begin(), results[k].capacity.end());
    }
    out.deficits = capacity_deficit(stamps, out.demand_gw, out.capacity_gw);
    return out;
}

std::vector<SweepPoint> sensitivity_sweep(const SystemConfig& cfg, const WeatherInputs& inputs,
                                          const load::LoadModel& load_model, const load::HolidaySet& holidays,
                                          std::span<const double> deltas_onset, std::span<const double> deltas_recovery,
                                          SweepScope scope, const RunOptions& options)
{
    std::vector<double> onset(deltas_onset.begin(), deltas_onset.end());
    std::vector<double> recovery(deltas_recovery.begin(), deltas_recovery.end());
    std::sort(onset.begin(), onset.end());
    std::sort(recovery.begin(), recovery.end());
    if (onset.empty() || recovery.empty()) throw InputError("sensitivity sweep needs at least one delta per axis");
    if (scope == SweepScope::GasOnly && !cfg.models.contains(Technology::Gas))
        throw InputError("gas-only sweep requires a gas outage model");

    std::vector<SweepPoint> table;
    for (double d_on : onset) {
        for (double d_rec : recovery) {
            SystemConfig shifted = cfg;
            for (auto& [tech, model] : shifted.models)
                if (scope == SweepScope::AllTechnologies || tech == Technology::Gas)
                    model = outage::shift_thresholds(model, d_on, d_rec);
            const auto run = run_years(shifted, inputs, load_model, holidays, {}, options);
            table.push_back(SweepPoint{d_on, d_rec, run.deficits.total_gwh(), run.deficits.annual});
        }
    }
    return table;
}

}  // namespace winterrisk::deficit
