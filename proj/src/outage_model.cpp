#include "winterrisk/outage_model.hpp"

#include "winterrisk/csv.hpp"
#include "winterrisk/error.hpp"
#include "winterrisk/kvfile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>

namespace winterrisk::outage {

std::string_view to_string(Technology t)
{
    switch (t) {
    case Technology::Gas: return "gas";
    case Technology::Coal: return "coal";
    case Technology::WindNorth: return "wind-north";
    case Technology::WindSouth: return "wind-south";
    }
    return "unknown";
}

Technology parse_technology(std::string_view s)
{
    for (Technology t : kAllTechnologies)
        if (to_string(t) == s) return t;
    throw InputError(fmt::format("unknown technology '{}' (expected gas, coal, wind-north or wind-south)", s));
}

bool is_wind(Technology t)
{
    return t == Technology::WindNorth || t == Technology::WindSouth;
}

void OutageModel::validate() const
{
    if (!(plateau_gw >= 0.0) || !std::isfinite(plateau_gw))
        throw InputError(fmt::format("{} outage model: plateau must be >= 0", to_string(technology)));
    if (!(recovery_slope_gw_per_h > 0.0) || !std::isfinite(recovery_slope_gw_per_h))
        throw InputError(fmt::format("{} outage model: recovery slope must be > 0", to_string(technology)));
    if (!(onset_temp_c < recovery_temp_c))
        throw InputError(fmt::format("{} outage model: onset {} degC must be below recovery {} degC",
                                     to_string(technology), onset_temp_c, recovery_temp_c));
    if (min_full_hours < 1)
        throw InputError(fmt::format("{} outage model: minimum full-outage duration must be >= 1 h",
                                     to_string(technology)));
}

namespace {

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double sse = 0.0;
};

/// Least-squares line through (i, y[i]) for i in [0, n).
LineFit fit_line(std::span<const double> y)
{
    const auto n = static_cast<double>(y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto x = static_cast<double>(i);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    LineFit f;
    const double den = n * sxx - sx * sx;
    f.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    f.intercept = (sy - f.slope * sx) / n;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * static_cast<double>(i));
        f.sse += r * r;
    }
    return f;
}

}  // namespace

OutageModel fit_outage_model(const OutageEpisode& ep, const FitOptions& opt)
{
    const std::size_t n = ep.outage_gw.size();
    if (ep.temps_c.size() != n)
        throw InputError(fmt::format("outage episode: {} outage values but {} temperatures", n, ep.temps_c.size()));
    if (n < 24) throw InputError(fmt::format("outage episode: {} hours, need at least 24", n));
    for (double o : ep.outage_gw)
        if (!(o >= 0.0) || !std::isfinite(o)) throw InputError("outage episode: outages must be finite and >= 0");
    if (opt.min_full_hours < 1 || opt.tail_points < 1) throw InputError("outage fit: invalid options");

    // (1) onset: largest single-hour increase, earliest on ties
    std::size_t onset = 0;
    double best_rise = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double rise = ep.outage_gw[k] - ep.outage_gw[k - 1];
        if (rise > best_rise) {
            best_rise = rise;
            onset = k;
        }
    }
    if (onset == 0) throw NumericError("outage episode never increases; no onset can be identified");

    // (2) plateau span [onset, recovery)
    std::size_t recovery = n;
    for (std::size_t k = onset + static_cast<std::size_t>(opt.min_full_hours); k < n; ++k) {
        if (ep.temps_c[k] > opt.recovery_temp_c) {
            recovery = k;
            break;
        }
    }
    if (recovery == n)
        throw NumericError(fmt::format("outage episode: temperature never exceeds the recovery temperature {} degC",
                                       opt.recovery_temp_c));
    const double area = std::accumulate(ep.outage_gw.begin() + static_cast<std::ptrdiff_t>(onset),
                                        ep.outage_gw.begin() + static_cast<std::ptrdiff_t>(recovery), 0.0);

    // (3)+(4) falling line, then constant tail at the mean of the last points
    const std::span<const double> post(ep.outage_gw.data() + recovery, n - recovery);
    const auto tail_n = static_cast<std::size_t>(opt.tail_points);
    if (post.size() < tail_n + 2)
        throw NumericError(fmt::format("outage episode: {} h after recovery, need at least {}", post.size(),
                                       tail_n + 2));
    const double tail = std::accumulate(post.end() - static_cast<std::ptrdiff_t>(tail_n), post.end(), 0.0) /
                        static_cast<double>(tail_n);

    std::vector<double> tail_sse(post.size() + 1, 0.0);  // SSE of post[b..] about `tail`
    for (std::size_t b = post.size(); b-- > 0;) tail_sse[b] = tail_sse[b + 1] + (post[b] - tail) * (post[b] - tail);

    double best_sse = std::numeric_limits<double>::infinity();
    LineFit best{};
    for (std::size_t b = 2; b <= post.size(); ++b) {
        const LineFit line = fit_line(post.first(b));
        const double sse = line.sse + tail_sse[b];
        if (sse < best_sse) {
            best_sse = sse;
            best = line;
        }
    }
    if (!(best.slope < 0.0)) throw NumericError("outage episode: outages do not decline after recovery");

    OutageModel m;
    m.technology = ep.technology;
    m.onset_temp_c = ep.temps_c[onset];
    m.plateau_gw = area / static_cast<double>(recovery - onset);
    m.recovery_temp_c = opt.recovery_temp_c;
    m.recovery_slope_gw_per_h = -best.slope;
    m.min_full_hours = opt.min_full_hours;
    m.baseline_pre_gw = ep.outage_gw.front();
    m.baseline_post_gw = tail;
    if (!(m.onset_temp_c < m.recovery_temp_c))
        throw NumericError(fmt::format("outage episode: onset temperature {} degC is not below recovery {} degC",
                                       m.onset_temp_c, m.recovery_temp_c));
    return m;
}

std::vector<double> simulate_outages(const OutageModel& m, std::span<const double> temps)
{
    m.validate();
    enum class State { Idle, Full, Declining };
    State state = State::Idle;
    std::int64_t full_since = 0;
    double level = 0.0;
    std::vector<double> out(temps.size(), 0.0);
    for (std::size_t i = 0; i < temps.size(); ++i) {
        const auto t = static_cast<std::int64_t>(i);
        if (temps[i] < m.onset_temp_c) {
            if (state != State::Full) {
                state = State::Full;
                full_since = t;
            }
            level = m.plateau_gw;
        } else if (state == State::Full) {
            if (temps[i] > m.recovery_temp_c && t - full_since >= m.min_full_hours) {
                state = State::Declining;
                level = m.plateau_gw - m.recovery_slope_gw_per_h;
            }
        } else if (state == State::Declining) {
            level -= m.recovery_slope_gw_per_h;
        }
        if (state == State::Declining && level <= 0.0) {
            state = State::Idle;
            level = 0.0;
        }
        out[i] = level;
    }
    return out;
}

OutageModel shift_thresholds(const OutageModel& model, double d_onset_c, double d_recovery_c)
{
    OutageModel m = model;
    m.onset_temp_c += d_onset_c;
    m.recovery_temp_c += d_recovery_c;
    if (!(m.onset_temp_c < m.recovery_temp_c))
        throw InputError(fmt::format("{}: shifted onset {} degC is not below shifted recovery {} degC",
                                     to_string(m.technology), m.onset_temp_c, m.recovery_temp_c));
    return m;
}

void write_model(const std::filesystem::path& path, const OutageModel& m)
{
    kv::write(path,
              {{"technology", std::string(to_string(m.technology))},
               {"onset_temp_c", kv::exact(m.onset_temp_c)},
               {"plateau_gw", kv::exact(m.plateau_gw)},
               {"recovery_temp_c", kv::exact(m.recovery_temp_c)},
               {"recovery_slope_gw_per_h", kv::exact(m.recovery_slope_gw_per_h)},
               {"min_full_hours", std::to_string(m.min_full_hours)},
               {"baseline_pre_gw", kv::exact(m.baseline_pre_gw)},
               {"baseline_post_gw", kv::exact(m.baseline_post_gw)}},
              "temperature-triggered outage model");
}

OutageModel read_model(const std::filesystem::path& path)
{
    const auto tree = kv::read(path);
    const std::string src = path.string();
    OutageModel m;
    m.technology = parse_technology(kv::text(tree, "technology", src));
    m.onset_temp_c = kv::number(tree, "onset_temp_c", src);
    m.plateau_gw = kv::number(tree, "plateau_gw", src);
    m.recovery_temp_c = kv::number_or(tree, "recovery_temp_c", 0.0, src);
    m.recovery_slope_gw_per_h = kv::number(tree, "recovery_slope_gw_per_h", src);
    m.min_full_hours = static_cast<int>(kv::number_or(tree, "min_full_hours", 10, src));
    m.baseline_pre_gw = kv::number_or(tree, "baseline_pre_gw", 0.0, src);
    m.baseline_post_gw = kv::number_or(tree, "baseline_post_gw", 0.0, src);
    try {
        m.validate();
    } catch (const InputError& e) {
        throw InputError(src + ": " + e.what());
    }
    return m;
}

OutageEpisode read_episode(const std::filesystem::path& outages_csv, const weather::WeightedTemperatureSeries& temps,
                           Technology technology, const UtcOffsetTable& offsets)
{
    const auto table = csv::Table::read(outages_csv);
    const auto c_ts = table.column("timestamp");
    const auto c_tech = table.column("tech");
    const auto c_o = table.column("outage_gw");

    std::map<HourStamp, double> temp_at;
    for (std::size_t i = 0; i < temps.size(); ++i) temp_at.emplace(temps.timestamps[i], temps.values[i]);

    OutageEpisode ep;
    ep.technology = technology;
    HourStamp prev{};
    for (const auto& row : table.rows()) {
        if (table.text(row, c_tech) != to_string(technology)) continue;
        HourStamp t;
        try {
            t = parse_timestamp(table.text(row, c_ts), offsets);
        } catch (const InputError& e) {
            throw InputError(table.where(row) + e.what());
        }
        if (!ep.outage_gw.empty() && t - prev != 1)
            throw InputError(table.where(row) + "outage rows must be hourly-contiguous per technology");
        const auto it = temp_at.find(t);
        if (it == temp_at.end())
            throw InputError(table.where(row) + "no temperature for " + format_timestamp(t));
        const double o = table.number(row, c_o);
        if (o < 0.0) throw InputError(table.where(row) + "negative outage");
        ep.outage_gw.push_back(o);
        ep.temps_c.push_back(it->second);
        prev = t;
    }
    if (ep.outage_gw.empty())
        throw InputError(fmt::format("{}: no rows for technology '{}'", table.source(), to_string(technology)));
    return ep;
}

ObservedOutages read_observed_outages(const std::filesystem::path& outages_csv, const UtcOffsetTable& offsets)
{
    const auto table = csv::Table::read(outages_csv);
    const auto c_ts = table.column("timestamp");
    const auto c_tech = table.column("tech");
    const auto c_o = table.column("outage_gw");
    ObservedOutages out;
    for (const auto& row : table.rows()) {
        Technology tech;
        HourStamp t;
        try {
            tech = parse_technology(table.text(row, c_tech));
            t = parse_timestamp(table.text(row, c_ts), offsets);
        } catch (const InputError& e) {
            throw InputError(table.where(row) + e.what());
        }
        const double o = table.number(row, c_o);
        if (!(o >= 0.0) || !std::isfinite(o)) throw InputError(table.where(row) + "outage must be finite and >= 0");
        if (!out[tech].emplace(t, o).second)
            throw InputError(table.where(row) + "duplicate hour " + format_timestamp(t) + " for " + std::string(to_string(tech)));
    }
    return out;
}

}  // namespace winterrisk::outage
