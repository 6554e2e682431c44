#include "winterrisk/cli/commands.hpp"

#include "winterrisk/csv.hpp"
#include "winterrisk/error.hpp"
#include "winterrisk/events.hpp"
#include "winterrisk/kvfile.hpp"
#include "winterrisk/rng.hpp"
#include "winterrisk/weather.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#ifndef WINTERRISK_VERSION
#define WINTERRISK_VERSION "dev"
#endif

namespace winterrisk::cli {

namespace fs = std::filesystem;
using outage::Technology;

namespace {

fs::path resolve(const fs::path& base_dir, const std::string& p)
{
    const fs::path path(p);
    return path.is_absolute() ? path : (base_dir / path).lexically_normal();
}

std::string na_or(double v, int decimals = 6)
{
    return std::isfinite(v) ? csv::num(v, decimals) : std::string("NA");
}

std::string join_years(const std::set<int>& years)
{
    std::string s;
    for (int y : years) s += (s.empty() ? "" : ",") + std::to_string(y);
    return s;
}

std::set<int> parse_years(const std::string& text)
{
    std::set<int> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) out.insert(std::stoi(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string scenario_text(std::span<const deficit::WinterizationScenario> scenarios)
{
    std::string s;
    for (const auto& w : scenarios)
        s += (s.empty() ? "" : ";") + fmt::format("{}={}", outage::to_string(w.technology), kv::exact(w.winterized_gw));
    return s;
}

std::vector<deficit::WinterizationScenario> parse_scenarios(const std::string& text)
{
    std::vector<deficit::WinterizationScenario> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto semi = text.find(';', pos);
        const std::string item = text.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
        if (!item.empty()) out.push_back(parse_winterize(item));
        if (semi == std::string::npos) break;
        pos = semi + 1;
    }
    return out;
}

double parse_number(const std::string& text, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InputError(fmt::format("{}: '{}' is not a number", what, text));
    }
}

std::string events_csv(std::span<const events::Event> list)
{
    std::string out = "year,start,end,duration_h,intensity,severity\n";
    for (const auto& e : list)
        out += fmt::format("{},{},{},{},{},{}\n", e.year, format_timestamp(e.start), format_timestamp(e.end),
                           e.duration_h, csv::num(e.intensity), csv::num(e.severity));
    return out;
}

events::Mode parse_mode(const std::string& s)
{
    if (s == "above") return events::Mode::Above;
    if (s == "below") return events::Mode::Below;
    throw InputError(fmt::format("mode must be 'above' or 'below', got '{}'", s));
}

std::vector<double> annual_values(const deficit::DeficitSeries& d, const std::set<int>& excluded)
{
    std::vector<double> v;
    for (const auto& a : d.annual)
        if (!excluded.contains(a.year)) v.push_back(a.total_gwh);
    return v;
}

std::string deficits_csv(const deficit::DeficitSeries& d, const std::set<int>& excluded)
{
    std::string out = "year,total_deficit_gwh,peak_deficit_gw,deficit_hours\n";
    for (const auto& a : d.annual) {
        if (excluded.contains(a.year)) continue;
        out += fmt::format("{},{},{},{}\n", a.year, csv::num(a.total_gwh), csv::num(a.peak_gw), a.deficit_hours);
    }
    return out;
}

/// Annual deficits as written by `simulate`.
std::vector<std::pair<int, double>> read_deficits(const fs::path& path)
{
    const auto table = csv::Table::read(path);
    const auto c_year = table.column("year");
    const auto c_total = table.column("total_deficit_gwh");
    std::vector<std::pair<int, double>> out;
    for (const auto& row : table.rows())
        out.emplace_back(static_cast<int>(table.number(row, c_year)), table.number(row, c_total));
    return out;
}

// ---------------------------------------------------------------------------
// Commands

struct SynthArgs {
    fs::path out;
    std::uint64_t seed = kDefaultSeed;
    int start_year = 1950;
    int years = 72;
    std::string spells;
    std::vector<std::string> sites;
    bool field = false;
    std::string load_model;
    std::string holidays;
    double load_noise = 0.5;
    double floor_c = std::numeric_limits<double>::quiet_NaN();
};

int cmd_synth_weather(const SynthArgs& a, std::ostream& out)
{
    std::vector<weather::ColdSpell> spells;
    if (!a.spells.empty()) {
        const auto table = csv::Table::read(a.spells);
        const auto cy = table.column("year"), cs = table.column("start_hour"), cd = table.column("depth_c"),
                   cl = table.column("length_hours");
        for (const auto& row : table.rows())
            spells.push_back(weather::ColdSpell{static_cast<int>(table.number(row, cy)),
                                                static_cast<int>(table.number(row, cs)), table.number(row, cd),
                                                static_cast<int>(table.number(row, cl))});
    }
    weather::ClimateProfile profile;
    profile.start_year = a.start_year;
    profile.floor_c = a.floor_c;
    const auto field = weather::synth_weather(a.seed, a.years, profile, spells);
    fs::create_directories(a.out);
    if (a.field) weather::write_field_csv(a.out / "field.csv", field);

    std::optional<weather::WeightedTemperatureSeries> population;
    for (const auto& entry : a.sites) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError(fmt::format("--sites expects name=path, got '{}'", entry));
        const std::string name = entry.substr(0, eq);
        const auto sites = weather::read_sites_csv(entry.substr(eq + 1));
        const auto map = weather::build_weight_map(sites, field.grid(), name);
        const auto series = weather::weighted_index(field, map);
        weather::write_series_csv(a.out / (name + ".csv"), series);
        out << fmt::format("wrote {} ({} hours)\n", (a.out / (name + ".csv")).string(), series.size());
        if (name == "population") population = series;
    }

    if (!a.load_model.empty()) {
        if (!population) throw InputError("--load-model needs a 'population' site set to drive demand");
        const auto model = load::read_model(a.load_model);
        const auto holidays = a.holidays.empty() ? load::HolidaySet{} : load::read_holidays(a.holidays);
        auto demand = load::predict(model, load::build_design(population->timestamps, population->values, holidays,
                                                              model.temp_power));
        rng::Stream noise(a.seed, 0x10ad);
        for (double& d : demand) d += a.load_noise * noise.normal();
        weather::WeightedTemperatureSeries load{population->timestamps, demand, "load"};
        weather::write_series_csv(a.out / "load.csv", load, "load_gw");
        out << fmt::format("wrote {}\n", (a.out / "load.csv").string());
    }
    return 0;
}

struct WeightArgs {
    std::string field, sites, label, out;
    std::optional<double> split_lat;
};

int cmd_weight(const WeightArgs& a, std::ostream& out)
{
    const auto field = weather::read_field_csv(a.field);
    const auto sites = weather::read_sites_csv(a.sites);
    const std::string label = a.label.empty() ? fs::path(a.sites).stem().string() : a.label;
    const fs::path dest(a.out);
    if (a.split_lat) {
        const auto maps = weather::build_split_weight_maps(sites, field.grid(), *a.split_lat, label);
        for (const auto* m : {&maps.south, &maps.north}) {
            const fs::path p = dest.parent_path() / (dest.stem().string() + m->label.substr(label.size()) + ".csv");
            weather::write_series_csv(p, weather::weighted_index(field, *m));
            out << fmt::format("wrote {}\n", p.string());
        }
    } else {
        weather::write_series_csv(dest, weather::weighted_index(field, weather::build_weight_map(sites, field.grid(), label)));
        out << fmt::format("wrote {}\n", dest.string());
    }
    return 0;
}

struct FitLoadArgs {
    std::string load, temps, holidays, out;
    int power = 4;
    int utc_offset = -6;
};

int cmd_fit_load(const FitLoadArgs& a, std::ostream& out)
{
    const UtcOffsetTable offsets(a.utc_offset);
    const auto load = weather::read_series_csv(a.load, "load_gw", offsets);
    const auto temps = weather::read_series_csv(a.temps, "temp_c", offsets);
    const auto holidays = a.holidays.empty() ? load::HolidaySet{} : load::read_holidays(a.holidays);

    std::vector<HourStamp> ts;
    std::vector<double> t, y;
    std::size_t j = 0;
    for (std::size_t i = 0; i < load.size(); ++i) {
        if (!is_winter(load.timestamps[i])) continue;
        while (j < temps.size() && temps.timestamps[j] < load.timestamps[i]) ++j;
        if (j == temps.size() || temps.timestamps[j] != load.timestamps[i])
            throw InputError(fmt::format("{}: no temperature for {}", a.temps, format_timestamp(load.timestamps[i])));
        ts.push_back(load.timestamps[i]);
        t.push_back(temps.values[j]);
        y.push_back(load.values[i]);
    }
    if (ts.empty()) throw InputError(fmt::format("{}: no winter hours (December-February) to fit", a.load));
    const auto design = load::build_design(ts, t, holidays, a.power);
    const auto model = load::fit(design, y, temps.basis);
    load::write_model(a.out, model);
    out << fmt::format("observations={}\nrmse_gw={}\nr2={}\n", model.observations, csv::num(model.rmse_gw),
                       csv::num(model.r2));
    return 0;
}

struct FitOutageArgs {
    std::string outages, temps, tech, out;
    outage::FitOptions options;
    int utc_offset = -6;
};

int cmd_fit_outage(const FitOutageArgs& a, std::ostream& out)
{
    const UtcOffsetTable offsets(a.utc_offset);
    const auto tech = outage::parse_technology(a.tech);
    const auto temps = weather::read_series_csv(a.temps, "temp_c", offsets);
    const auto episode = outage::read_episode(a.outages, temps, tech, offsets);
    const auto m = outage::fit_outage_model(episode, a.options);
    outage::write_model(a.out, m);
    out << fmt::format("technology={}\nonset_temp_c={}\nplateau_gw={}\nrecovery_slope_gw_per_h={}\n",
                       outage::to_string(m.technology), csv::num(m.onset_temp_c), csv::num(m.plateau_gw),
                       csv::num(m.recovery_slope_gw_per_h));
    return 0;
}

struct SimulateArgs {
    std::string config, out;
    std::vector<std::string> winterize;
    std::string trend;
    std::vector<int> exclude_years;
    std::string observed;
    unsigned threads = 1;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out)
{
    Config cfg = read_config(a.config);
    if (!a.observed.empty()) cfg.observed_outages = fs::absolute(a.observed).lexically_normal();
    std::vector<deficit::WinterizationScenario> scenarios = cfg.winterize;
    for (const auto& w : a.winterize) scenarios.push_back(parse_winterize(w));
    const std::optional<Trend> trend = a.trend.empty() ? std::nullopt : std::optional<Trend>(parse_trend(a.trend));
    const std::set<int> excluded(a.exclude_years.begin(), a.exclude_years.end());

    const Inputs in = load_inputs(cfg, trend);
    const auto result = deficit::run_years(cfg.system, in.weather, in.load_model, in.holidays, scenarios,
                                           deficit::RunOptions{a.threads, true});
    if (result.deficits.annual.empty()) throw InputError("inputs hold no complete winter season");
    for (int y : excluded) {
        const bool present = std::any_of(result.deficits.annual.begin(), result.deficits.annual.end(),
                                         [&](const auto& d) { return d.year == y; });
        if (!present) throw InputError(fmt::format("--exclude-year {}: no such season in the run", y));
    }

    const fs::path dir(a.out);
    csv::write_file(dir / "deficits.csv", deficits_csv(result.deficits, excluded));

    std::string hourly = "timestamp,temp_c,demand_gw,capacity_gw,deficit_gw\n";
    hourly.reserve(result.demand_gw.size() * 64);
    const auto& d = result.deficits;
    for (std::size_t i = 0; i < d.timestamps.size(); ++i)
        hourly += fmt::format("{},{},{},{},{}\n", format_timestamp(d.timestamps[i]), csv::num(result.population_temp_c[i]),
                              csv::num(result.demand_gw[i]), csv::num(result.capacity_gw[i]), csv::num(d.deficit_gw[i]));
    csv::write_file(dir / "hourly.csv", hourly);

    const auto files = cfg.input_files();
    std::vector<std::pair<std::string, std::string>> manifest{
        {"command", "simulate"},
        {"config", fs::absolute(cfg.path).lexically_normal().string()},
        {"out", a.out},
        {"seed", std::to_string(a.seed)},
        {"version", WINTERRISK_VERSION},
        {"winterize", scenario_text(scenarios)},
        {"trend", trend ? fmt::format("{},{}", kv::exact(trend->slope_per_year), trend->y_ref) : std::string()},
        {"exclude_years", join_years(excluded)},
        {"observed_outages", cfg.observed_outages ? cfg.observed_outages->string() : std::string()},
    };
    for (std::size_t i = 0; i < files.size(); ++i) manifest.emplace_back(fmt::format("input_{}", i), files[i].string());
    manifest.emplace_back("content_hash", fmt::format("{:016x}", content_hash(files)));
    kv::write(dir / "manifest.txt", manifest, "winterrisk run manifest");

    double total = 0.0;
    for (const auto& y : d.annual)
        if (!excluded.contains(y.year)) total += y.total_gwh;
    out << fmt::format("seasons={}\ntotal_deficit_gwh={}\n", d.annual.size() - excluded.size(), csv::num(total));
    return 0;
}

struct EventsArgs {
    std::string series, column = "deficit_gw", mode = "above", out;
    double threshold = 0.0;
    int inter_event_h = 24;
};

int cmd_events(const EventsArgs& a, std::ostream& out)
{
    const auto s = weather::read_series_csv(a.series, a.column);
    const auto list = events::extract_events(s.timestamps, s.values, a.threshold, parse_mode(a.mode), a.inter_event_h);
    csv::write_file(a.out, events_csv(list));
    out << fmt::format("events={}\n", list.size());
    return 0;
}

struct BootstrapArgs {
    std::string deficits, winterized, out;
    economics::BootstrapParams params;
    std::vector<int> exclude_years;
};

int cmd_bootstrap(const BootstrapArgs& a, std::ostream& out)
{
    const std::set<int> excluded(a.exclude_years.begin(), a.exclude_years.end());
    auto values = [&](const std::string& path) {
        std::vector<double> v;
        for (const auto& [y, d] : read_deficits(path))
            if (!excluded.contains(y)) v.push_back(d);
        return v;
    };
    const auto base_set = values(a.deficits);
    const auto base = economics::bootstrap_losses(base_set, a.params);
    const fs::path dir(a.out);
    std::string dump = "iteration,loss_usd\n";
    for (std::size_t b = 0; b < base.losses_usd.size(); ++b) dump += fmt::format("{},{}\n", b, csv::num(base.losses_usd[b], 2));
    csv::write_file(dir / "distribution.csv", dump);

    const auto loss = economics::summarize(base.losses_usd);
    const auto energy = economics::summarize(base.lost_energy_gwh);
    const auto zero = std::count(base.losses_usd.begin(), base.losses_usd.end(), 0.0);
    out << fmt::format("years={}\nmean_loss_usd={}\np16_loss_usd={}\np84_loss_usd={}\n", base_set.size(),
                       csv::num(loss.mean, 2), csv::num(loss.p16, 2), csv::num(loss.p84, 2));
    out << fmt::format("mean_lost_load_gwh={}\np16_lost_load_gwh={}\np84_lost_load_gwh={}\nzero_loss_fraction={}\n",
                       csv::num(energy.mean), csv::num(energy.p16), csv::num(energy.p84),
                       csv::num(static_cast<double>(zero) / static_cast<double>(base.losses_usd.size())));

    if (!a.winterized.empty()) {
        const auto w = economics::bootstrap_losses(values(a.winterized), a.params);
        const auto avoided = economics::avoided_loss(base, w);
        std::string adump = "iteration,avoided_usd\n";
        for (std::size_t b = 0; b < avoided.size(); ++b) adump += fmt::format("{},{}\n", b, csv::num(avoided[b], 2));
        csv::write_file(dir / "avoided.csv", adump);
        const auto s = economics::summarize(avoided);
        out << fmt::format("mean_avoided_usd={}\np16_avoided_usd={}\np84_avoided_usd={}\n", csv::num(s.mean, 2),
                           csv::num(s.p16, 2), csv::num(s.p84, 2));
    }
    return 0;
}

struct SensitivityArgs {
    std::string config, out, scope = "gas";
    std::vector<double> onset{-3, -1.5, 0, 1.5, 3};
    std::vector<double> recovery{0};
    unsigned threads = 1;
};

int cmd_sensitivity(const SensitivityArgs& a, std::ostream& out)
{
    const Config cfg = read_config(a.config);
    deficit::SweepScope scope;
    if (a.scope == "gas")
        scope = deficit::SweepScope::GasOnly;
    else if (a.scope == "all")
        scope = deficit::SweepScope::AllTechnologies;
    else
        throw InputError(fmt::format("--scope must be 'gas' or 'all', got '{}'", a.scope));
    const Inputs in = load_inputs(cfg);
    deficit::SystemConfig sys = cfg.system;
    for (const auto& w : cfg.winterize) sys = deficit::apply_winterization(sys, w);
    const auto table = deficit::sensitivity_sweep(sys, in.weather, in.load_model, in.holidays, a.onset, a.recovery,
                                                  scope, deficit::RunOptions{a.threads, true});
    std::string csv_out = "d_onset_c,d_recovery_c,total_deficit_gwh\n";
    for (const auto& p : table)
        csv_out += fmt::format("{},{},{}\n", csv::num(p.d_onset_c, 3), csv::num(p.d_recovery_c, 3), csv::num(p.total_gwh));
    csv::write_file(a.out, csv_out);
    out << fmt::format("points={}\n", table.size());
    return 0;
}

struct ReportArgs {
    std::string run, out;
    economics::BootstrapParams params;
    int w_max = 20;
    int inter_event_h = 24;
    double frost_threshold_c = 0.0;
    std::vector<double> trend_thresholds{0, -2, -4, -6, -8, -10};
};

struct GevRow {
    std::string series, characteristic;
    std::size_t n = 0;
    std::optional<events::GevFit> fit;
    int year = 0;
    double value = 0.0;
    double period = std::numeric_limits<double>::quiet_NaN();
};

GevRow gev_row(std::string series, std::string characteristic, const std::vector<std::pair<int, double>>& annual,
               bool minima)
{
    GevRow r;
    r.series = std::move(series);
    r.characteristic = std::move(characteristic);
    r.n = annual.size();
    if (annual.empty()) return r;
    auto extreme = annual.front();
    for (const auto& p : annual)
        if (minima ? p.second < extreme.second : p.second > extreme.second) extreme = p;
    r.year = extreme.first;
    r.value = extreme.second;
    std::vector<double> v;
    for (const auto& p : annual) v.push_back(p.second);
    try {
        r.fit = events::fit_gev(v, minima);
        r.period = events::return_period(*r.fit, r.value);
    } catch (const NumericError&) {
        // too few distinct annual values for a fit
    }
    return r;
}

int cmd_report(const ReportArgs& a, std::ostream& out)
{
    const fs::path run(a.run);
    for (const char* f : {"manifest.txt", "hourly.csv", "deficits.csv"})
        if (!fs::exists(run / f)) throw InputError(fmt::format("{}: missing run output '{}'", run.string(), f));
    const auto manifest = kv::read(run / "manifest.txt");
    const std::string msrc = (run / "manifest.txt").string();
    Config cfg = read_config(kv::text(manifest, "config", msrc));
    if (const auto o = manifest.get<std::string>("observed_outages", ""); !o.empty()) cfg.observed_outages = fs::path(o);
    const auto scenarios = parse_scenarios(manifest.get<std::string>("winterize", ""));
    const std::string trend_text = manifest.get<std::string>("trend", "");
    const std::optional<Trend> trend = trend_text.empty() ? std::nullopt : std::optional<Trend>(parse_trend(trend_text));
    const std::set<int> excluded = parse_years(manifest.get<std::string>("exclude_years", ""));

    // hourly run output
    const auto table = csv::Table::read(run / "hourly.csv");
    const auto c_ts = table.column("timestamp"), c_t = table.column("temp_c"), c_d = table.column("deficit_gw");
    std::vector<HourStamp> ts;
    std::vector<double> temp, def;
    for (const auto& row : table.rows()) {
        ts.push_back(parse_timestamp(table.text(row, c_ts)));
        temp.push_back(table.number(row, c_t));
        def.push_back(table.number(row, c_d));
    }
    if (ts.empty()) throw InputError(fmt::format("{}: no hours", (run / "hourly.csv").string()));

    const fs::path dir(a.out);
    const auto deficit_events = events::extract_events(ts, def, 0.0, events::Mode::Above, a.inter_event_h);
    const auto frost_events = events::extract_events(ts, temp, a.frost_threshold_c, events::Mode::Below, a.inter_event_h);
    csv::write_file(dir / "deficit_events.csv", events_csv(deficit_events));
    csv::write_file(dir / "frost_events.csv", events_csv(frost_events));

    // extreme-value table
    std::vector<GevRow> gev;
    {
        const auto annual = events::annual_series(deficit_events);
        std::vector<std::pair<int, double>> dur, inten, sev;
        for (const auto& [y, e] : annual) {
            dur.emplace_back(y, e.duration_h);
            inten.emplace_back(y, e.intensity);
            sev.emplace_back(y, e.severity);
        }
        gev.push_back(gev_row("deficit", "duration_h", dur, false));
        gev.push_back(gev_row("deficit", "intensity_gw", inten, false));
        gev.push_back(gev_row("deficit", "severity_gwh", sev, false));
        const auto fannual = events::annual_series(frost_events);
        std::vector<std::pair<int, double>> fdur, fint, fsev;
        for (const auto& [y, e] : fannual) {
            fdur.emplace_back(y, e.duration_h);
            fint.emplace_back(y, e.intensity);
            fsev.emplace_back(y, e.severity);
        }
        gev.push_back(gev_row("frost", "duration_h", fdur, false));
        gev.push_back(gev_row("frost", "intensity_c", fint, true));
        gev.push_back(gev_row("frost", "severity_ch", fsev, false));
    }
    std::string gev_csv = "series,characteristic,n,location,scale,shape,extreme_year,extreme_value,return_period_years\n";
    for (const auto& r : gev) {
        gev_csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.series, r.characteristic, r.n,
                               r.fit ? csv::num(r.fit->location) : "NA", r.fit ? csv::num(r.fit->scale) : "NA",
                               r.fit ? csv::num(r.fit->shape) : "NA", r.n ? std::to_string(r.year) : "NA",
                               r.n ? csv::num(r.value) : "NA", std::isinf(r.period) ? "inf" : na_or(r.period, 3));
    }
    csv::write_file(dir / "return_periods.csv", gev_csv);

    // temperature trends
    std::map<int, double> minima;
    std::map<int, std::pair<double, int>> sums;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const int y = event_year(ts[i]);
        auto [it, inserted] = minima.try_emplace(y, temp[i]);
        if (!inserted) it->second = std::min(it->second, temp[i]);
        sums[y].first += temp[i];
        ++sums[y].second;
    }
    const auto trends = events::frost_trend_table(minima, a.trend_thresholds, 71.0);
    std::string trend_csv = "threshold_c,events,slope_yearly,slope_71yr,p_value\n";
    for (const auto& r : trends)
        trend_csv += fmt::format("{},{},{},{},{}\n", csv::num(r.threshold_c, 1), r.events, na_or(r.slope_yearly),
                                 na_or(r.slope_period), na_or(r.p_value));
    csv::write_file(dir / "trend.csv", trend_csv);
    double mean_trend = std::numeric_limits<double>::quiet_NaN();
    if (sums.size() >= 5) {
        std::vector<double> yrs, means;
        for (const auto& [y, s] : sums) {
            yrs.push_back(y);
            means.push_back(s.first / s.second);
        }
        mean_trend = events::mean_temp_trend(yrs, means);
    }

    // economics: paired bootstrap of every winterization level
    const Inputs in = load_inputs(cfg, trend);
    auto params = a.params;
    params.voll_usd_per_mwh = cfg.system.voll_usd_per_mwh;
    const deficit::RunOptions ropt{params.threads, true};
    auto annual_for = [&](std::vector<deficit::WinterizationScenario> s) {
        const auto r = deficit::run_years(cfg.system, in.weather, in.load_model, in.holidays, s, ropt);
        return annual_values(r.deficits, excluded);
    };
    const auto base_set = annual_for(scenarios);
    const auto base = economics::bootstrap_losses(base_set, params);
    std::string dump = "iteration,loss_usd\n";
    for (std::size_t b = 0; b < base.losses_usd.size(); ++b) dump += fmt::format("{},{}\n", b, csv::num(base.losses_usd[b], 2));
    csv::write_file(dir / "distribution.csv", dump);

    const auto costs = economics::winterization_costs(cfg.costs);
    std::string econ = "w_gw,tech,mean_avoided,p16,p84,marginal_mean,cost_per_gw,profitable\n";
    std::vector<std::pair<Technology, int>> profitable;
    std::vector<double> grid;
    for (int w = 0; w <= a.w_max; ++w) grid.push_back(w);
    for (const auto& [tech, model] : cfg.system.models) {
        std::vector<economics::Summary> avoided;
        for (double w : grid) {
            auto s = scenarios;
            s.push_back({tech, w});
            const auto dist = w == 0.0 ? base : economics::bootstrap_losses(annual_for(s), params);
            avoided.push_back(economics::summarize(economics::avoided_loss(base, dist)));
        }
        const auto curve = economics::marginal_curve(grid, avoided);
        std::vector<double> marginal;
        for (std::size_t i = 1; i < curve.size(); ++i) marginal.push_back(curve[i].marginal.mean);
        const double cost = costs.cost_per_gw(tech);
        const int gw = economics::profitable_capacity(marginal, cost);
        profitable.emplace_back(tech, gw);
        for (const auto& c : curve) {
            const bool ok = c.w_gw >= 1.0 && c.w_gw <= gw;
            econ += fmt::format("{},{},{},{},{},{},{},{}\n", static_cast<int>(c.w_gw), outage::to_string(tech),
                                csv::num(c.avoided.mean, 2), csv::num(c.avoided.p16, 2), csv::num(c.avoided.p84, 2),
                                c.w_gw == 0.0 ? "NA" : csv::num(c.marginal.mean, 2), csv::num(cost, 2), ok ? 1 : 0);
        }
    }
    csv::write_file(dir / "economics.csv", econ);

    // summary
    const auto deficits = read_deficits(run / "deficits.csv");
    double total = 0.0;
    int deficit_years = 0;
    for (const auto& [y, d] : deficits) {
        total += d;
        deficit_years += d > 0.0;
    }
    std::string sum;
    sum += fmt::format("seasons: {}\n", deficits.size());
    sum += fmt::format("total deficit: {} GWh ({} TWh)\n", csv::num(total, 3), fmt::format("{:.3g}", total / 1000.0));
    sum += fmt::format("seasons with deficit: {}\n", deficit_years);
    sum += fmt::format("{} deficit events\n", deficit_events.size());
    if (!deficit_events.empty()) {
        std::vector<std::size_t> order(deficit_events.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](auto x, auto y) { return deficit_events[x].severity > deficit_events[y].severity; });
        const auto& top = deficit_events[order.front()];
        sum += fmt::format("largest event: {} to {}, {} h, peak {} GW, {} GWh (rank 1 of {})\n",
                           format_timestamp(top.start), format_timestamp(top.end), top.duration_h,
                           csv::num(top.intensity, 3), csv::num(top.severity, 3), deficit_events.size());
        const auto& last = deficit_events.back();
        const auto rank = std::find(order.begin(), order.end(), deficit_events.size() - 1) - order.begin() + 1;
        sum += fmt::format("latest event: season {}, {} GWh (rank {} of {})\n", last.year, csv::num(last.severity, 3),
                           rank, deficit_events.size());
        sum += "ranking by severity:\n";
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto& e = deficit_events[order[k]];
            sum += fmt::format("  {:>3}  {}  {:>6} h  {} GWh\n", k + 1, e.year, e.duration_h, csv::num(e.severity, 3));
        }
    }
    sum += fmt::format("{} frost events below {} C\n", frost_events.size(), csv::num(a.frost_threshold_c, 1));
    sum += fmt::format("winter mean temperature trend: {} C/yr\n", na_or(mean_trend));
    const auto loss = economics::summarize(base.losses_usd);
    const auto energy = economics::summarize(base.lost_energy_gwh);
    const auto zero = std::count(base.losses_usd.begin(), base.losses_usd.end(), 0.0);
    sum += fmt::format("bootstrap: {} iterations, {} years, r = {}, seed {}\n", params.iterations, params.horizon_years,
                       params.discount_rate, params.seed);
    sum += fmt::format("expected lost load over horizon: {} GWh [{}, {}]\n", csv::num(energy.mean, 1),
                       csv::num(energy.p16, 1), csv::num(energy.p84, 1));
    sum += fmt::format("expected discounted loss: {} bn$ [{}, {}]\n", csv::num(loss.mean / 1e9, 3),
                       csv::num(loss.p16 / 1e9, 3), csv::num(loss.p84 / 1e9, 3));
    sum += fmt::format("iterations without loss: {}\n",
                       csv::num(static_cast<double>(zero) / static_cast<double>(params.iterations), 4));
    for (const auto& [tech, gw] : profitable)
        sum += fmt::format("profitable winterization {}: {} GW at {} M$/GW\n", outage::to_string(tech), gw,
                           csv::num(costs.cost_per_gw(tech) / 1e6, 1));
    csv::write_file(dir / "summary.txt", sum);
    out << sum;
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config and inputs

std::vector<fs::path> Config::input_files() const
{
    std::vector<fs::path> f{path, load_model};
    for (const auto& [t, p] : outage_models) f.push_back(p);
    f.push_back(population);
    for (const auto& [t, p] : plant_series) f.push_back(p);
    if (wind_generation) f.push_back(*wind_generation);
    if (holidays) f.push_back(*holidays);
    if (observed_outages) f.push_back(*observed_outages);
    return f;
}

Config read_config(const fs::path& path)
{
    if (!fs::exists(path)) throw InputError(fmt::format("{}: config file not found", path.string()));
    const auto tree = kv::read(path);
    const std::string src = path.string();
    const fs::path base = path.parent_path();
    Config c;
    c.path = path;

    const auto sys = tree.get_child_optional("system");
    if (sys) {
        c.system.c_thermal_gw = kv::number_or(*sys, "c_thermal_gw", c.system.c_thermal_gw, src);
        c.system.c_wind_gw = kv::number_or(*sys, "c_wind_gw", c.system.c_wind_gw, src);
        c.system.voll_usd_per_mwh = kv::number_or(*sys, "voll", c.system.voll_usd_per_mwh, src);
        c.wind_capacity_factor = kv::number_or(*sys, "wind_capacity_factor", c.wind_capacity_factor, src);
    }
    if (!(c.wind_capacity_factor >= 0.0 && c.wind_capacity_factor <= 1.0))
        throw InputError(fmt::format("{}: wind_capacity_factor must lie in [0, 1]", src));

    const auto models = tree.get_child_optional("models");
    if (!models) throw InputError(fmt::format("{}: missing [models] section", src));
    c.load_model = resolve(base, kv::text(*models, "load", src + " [models]"));
    for (Technology t : outage::kAllTechnologies) {
        const auto p = models->get_optional<std::string>(std::string(outage::to_string(t)));
        if (p) c.outage_models[t] = resolve(base, *p);
    }

    const auto inputs = tree.get_child_optional("inputs");
    if (!inputs) throw InputError(fmt::format("{}: missing [inputs] section", src));
    c.population = resolve(base, kv::text(*inputs, "population", src + " [inputs]"));
    for (const auto& [t, p] : c.outage_models)
        c.plant_series[t] =
            resolve(base, kv::text(*inputs, std::string(outage::to_string(t)), src + " [inputs]"));
    if (const auto w = inputs->get_optional<std::string>("wind_generation")) c.wind_generation = resolve(base, *w);
    if (const auto h = inputs->get_optional<std::string>("holidays")) c.holidays = resolve(base, *h);
    if (const auto o = inputs->get_optional<std::string>("observed_outages")) c.observed_outages = resolve(base, *o);

    if (const auto time = tree.get_child_optional("time"))
        c.utc_offset_hours = static_cast<int>(kv::number_or(*time, "utc_offset_hours", c.utc_offset_hours, src));

    if (const auto wint = tree.get_child_optional("winterize")) {
        for (const auto& [key, node] : *wint)
            c.winterize.push_back({outage::parse_technology(key), parse_number(node.data(), src + " [winterize] " + key)});
    }

    if (const auto costs = tree.get_child_optional("costs")) {
        auto& k = c.costs;
        const std::pair<const char*, double*> fields[] = {
            {"gas_wells", &k.gas_wells},
            {"cost_per_well_usd", &k.cost_per_well_usd},
            {"failed_gas_gw", &k.failed_gas_gw},
            {"gas_plant_capex_usd_per_gw", &k.gas_plant_capex_usd_per_gw},
            {"gas_plant_share", &k.gas_plant_share},
            {"coal_plant_capex_usd_per_gw", &k.coal_plant_capex_usd_per_gw},
            {"coal_plant_share", &k.coal_plant_share},
            {"wind_plant_capex_usd_per_gw", &k.wind_plant_capex_usd_per_gw},
            {"wind_plant_share", &k.wind_plant_share},
        };
        for (const auto& [name, ptr] : fields) *ptr = kv::number_or(*costs, name, *ptr, src);
    }

    for (const auto& [t, p] : c.outage_models) c.system.models[t] = outage::read_model(p);
    c.system.validate();
    return c;
}

Inputs load_inputs(const Config& cfg, const std::optional<Trend>& trend)
{
    const UtcOffsetTable offsets(cfg.utc_offset_hours);
    Inputs in;
    auto read_temps = [&](const fs::path& p) {
        auto s = weather::read_series_csv(p, "temp_c", offsets);
        if (trend) s = weather::apply_trend(s, trend->slope_per_year, trend->y_ref);
        return s;
    };
    in.weather.population = read_temps(cfg.population);
    for (const auto& [t, p] : cfg.plant_series) in.weather.plant_temps[t] = read_temps(p);
    if (cfg.wind_generation) {
        const auto w = weather::read_series_csv(*cfg.wind_generation, "wind_gen_gw", offsets);
        if (w.timestamps != in.weather.population.timestamps)
            throw InputError(fmt::format("{}: wind generation hours differ from the population series",
                                         cfg.wind_generation->string()));
        in.weather.wind_gen_gw = w.values;
    } else {
        in.weather.wind_gen_gw.assign(in.weather.population.size(), cfg.wind_capacity_factor * cfg.system.c_wind_gw);
    }
    if (cfg.observed_outages) in.weather.observed_outages_gw = outage::read_observed_outages(*cfg.observed_outages, offsets);
    in.load_model = load::read_model(cfg.load_model);
    if (cfg.holidays) in.holidays = load::read_holidays(*cfg.holidays);
    return in;
}

deficit::WinterizationScenario parse_winterize(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw InputError(fmt::format("winterization '{}' is not tech=GW", text));
    deficit::WinterizationScenario s;
    s.technology = outage::parse_technology(text.substr(0, eq));
    s.winterized_gw = parse_number(text.substr(eq + 1), "winterized capacity");
    if (s.winterized_gw < 0.0) throw InputError(fmt::format("winterization '{}': capacity must be >= 0", text));
    return s;
}

Trend parse_trend(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InputError(fmt::format("trend '{}' is not slope,y_ref", text));
    Trend t;
    t.slope_per_year = parse_number(text.substr(0, comma), "trend slope");
    const double y = parse_number(text.substr(comma + 1), "trend reference year");
    if (y != std::floor(y)) throw InputError(fmt::format("trend reference year '{}' is not an integer", text.substr(comma + 1)));
    t.y_ref = static_cast<int>(y);
    return t;
}

std::uint64_t content_hash(std::span<const fs::path> files)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::vector<char> buf(1 << 16);
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw InputError(fmt::format("{}: cannot open for hashing", f.string()));
        while (in) {
            in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
            for (std::streamsize i = 0; i < in.gcount(); ++i) {
                h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
                h *= 0x100000001b3ULL;
            }
        }
    }
    return h;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Winter power deficit risk: load and outage models, deficit simulation, events, economics"};
    app.name("winterrisk");
    app.set_version_flag("--version", WINTERRISK_VERSION);
    app.require_subcommand(1);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth-weather", "Generate synthetic gridded weather and weighted series");
    c_synth->add_option("--out", synth.out, "Output directory")->required();
    c_synth->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    c_synth->add_option("--start-year", synth.start_year)->capture_default_str();
    c_synth->add_option("--years", synth.years)->capture_default_str();
    c_synth->add_option("--spells", synth.spells, "Cold spells CSV: year,start_hour,depth_c,length_hours");
    c_synth->add_option("--sites", synth.sites, "name=sites.csv, writes <name>.csv");
    c_synth->add_flag("--field", synth.field, "Also write the gridded field.csv");
    c_synth->add_option("--load-model", synth.load_model, "Write load.csv from this model on the population series");
    c_synth->add_option("--holidays", synth.holidays);
    c_synth->add_option("--load-noise", synth.load_noise, "Demand noise sigma, GW")->capture_default_str();
    c_synth->add_option("--floor", synth.floor_c, "Clamp baseline temperatures at this value");

    WeightArgs weight;
    auto* c_weight = app.add_subcommand("weight", "Weighted temperature index from a gridded field");
    c_weight->add_option("--field", weight.field)->required();
    c_weight->add_option("--sites", weight.sites)->required();
    c_weight->add_option("--label", weight.label);
    c_weight->add_option("--out", weight.out)->required();
    c_weight->add_option("--split-lat", weight.split_lat, "Write <out>-south and <out>-north split at this latitude");

    FitLoadArgs fl;
    auto* c_fl = app.add_subcommand("fit-load", "Fit the hourly demand regression on winter hours");
    c_fl->add_option("--load", fl.load, "CSV timestamp,load_gw")->required();
    c_fl->add_option("--temps", fl.temps, "CSV timestamp,temp_c")->required();
    c_fl->add_option("--holidays", fl.holidays);
    c_fl->add_option("--out", fl.out)->required();
    c_fl->add_option("--power", fl.power)->capture_default_str();
    c_fl->add_option("--utc-offset", fl.utc_offset)->capture_default_str();

    FitOutageArgs fo;
    auto* c_fo = app.add_subcommand("fit-outage", "Fit a technology's outage function to one episode");
    c_fo->add_option("--outages", fo.outages, "CSV timestamp,tech,outage_gw")->required();
    c_fo->add_option("--temps", fo.temps, "CSV timestamp,temp_c")->required();
    c_fo->add_option("--tech", fo.tech)->required();
    c_fo->add_option("--out", fo.out)->required();
    c_fo->add_option("--recovery-temp", fo.options.recovery_temp_c)->capture_default_str();
    c_fo->add_option("--min-full-hours", fo.options.min_full_hours)->capture_default_str();
    c_fo->add_option("--tail-points", fo.options.tail_points)->capture_default_str();
    c_fo->add_option("--utc-offset", fo.utc_offset)->capture_default_str();

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate winter deficits for every season");
    c_sim->add_option("--config", sim.config)->required();
    c_sim->add_option("--out", sim.out)->required();
    c_sim->add_option("--winterize", sim.winterize, "tech=GW, repeatable");
    c_sim->add_option("--trend", sim.trend, "slope,y_ref");
    c_sim->add_option("--exclude-year", sim.exclude_years);
    c_sim->add_option("--observed-outages", sim.observed, "CSV timestamp,tech,outage_gw replacing simulated outages");
    c_sim->add_option("--threads", sim.threads)->capture_default_str();
    c_sim->add_option("--seed", sim.seed)->capture_default_str();

    EventsArgs ev;
    auto* c_ev = app.add_subcommand("events", "Pooled threshold events of an hourly series");
    c_ev->add_option("--series", ev.series)->required();
    c_ev->add_option("--column", ev.column)->capture_default_str();
    c_ev->add_option("--threshold", ev.threshold)->capture_default_str();
    c_ev->add_option("--mode", ev.mode, "above or below")->capture_default_str();
    c_ev->add_option("--inter-event", ev.inter_event_h)->capture_default_str();
    c_ev->add_option("--out", ev.out)->required();

    BootstrapArgs bs;
    auto* c_bs = app.add_subcommand("bootstrap", "Bootstrap discounted losses from annual deficits");
    c_bs->add_option("--deficits", bs.deficits)->required();
    c_bs->add_option("--winterized", bs.winterized, "Second deficits CSV for paired avoided loss");
    c_bs->add_option("--out", bs.out)->required();
    c_bs->add_option("--iterations", bs.params.iterations)->capture_default_str();
    c_bs->add_option("--horizon", bs.params.horizon_years)->capture_default_str();
    c_bs->add_option("--rate", bs.params.discount_rate)->capture_default_str();
    c_bs->add_option("--voll", bs.params.voll_usd_per_mwh)->capture_default_str();
    c_bs->add_option("--seed", bs.params.seed)->capture_default_str();
    c_bs->add_option("--threads", bs.params.threads)->capture_default_str();
    c_bs->add_option("--exclude-year", bs.exclude_years);

    SensitivityArgs sens;
    auto* c_sens = app.add_subcommand("sensitivity", "Total deficit over onset/recovery temperature shifts");
    c_sens->add_option("--config", sens.config)->required();
    c_sens->add_option("--out", sens.out)->required();
    c_sens->add_option("--onset", sens.onset)->delimiter(',')->capture_default_str();
    c_sens->add_option("--recovery", sens.recovery)->delimiter(',')->capture_default_str();
    c_sens->add_option("--scope", sens.scope, "gas or all")->capture_default_str();
    c_sens->add_option("--threads", sens.threads)->capture_default_str();

    ReportArgs rep;
    auto* c_rep = app.add_subcommand("report", "Events, return periods, trends and economics of a run");
    c_rep->add_option("--run", rep.run, "Output directory of simulate")->required();
    c_rep->add_option("--out", rep.out)->required();
    c_rep->add_option("--iterations", rep.params.iterations)->capture_default_str();
    c_rep->add_option("--horizon", rep.params.horizon_years)->capture_default_str();
    c_rep->add_option("--rate", rep.params.discount_rate)->capture_default_str();
    c_rep->add_option("--seed", rep.params.seed)->capture_default_str();
    c_rep->add_option("--threads", rep.params.threads)->capture_default_str();
    c_rep->add_option("--w-max", rep.w_max, "Largest winterized GW on the economics grid")->capture_default_str();
    c_rep->add_option("--inter-event", rep.inter_event_h)->capture_default_str();
    c_rep->add_option("--frost-threshold", rep.frost_threshold_c)->capture_default_str();
    c_rep->add_option("--trend-thresholds", rep.trend_thresholds)->delimiter(',')->capture_default_str();

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(WINTERRISK_VERSION) + "\n"
                                                                   : app.help());
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (c_synth->parsed()) return cmd_synth_weather(synth, out);
        if (c_weight->parsed()) return cmd_weight(weight, out);
        if (c_fl->parsed()) return cmd_fit_load(fl, out);
        if (c_fo->parsed()) return cmd_fit_outage(fo, out);
        if (c_sim->parsed()) return cmd_simulate(sim, out);
        if (c_ev->parsed()) return cmd_events(ev, out);
        if (c_bs->parsed()) return cmd_bootstrap(bs, out);
        if (c_sens->parsed()) return cmd_sensitivity(sens, out);
        if (c_rep->parsed()) return cmd_report(rep, out);
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace winterrisk::cli
