#include "winterrisk/events.hpp"

#include "winterrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace winterrisk::events {

namespace {

bool beyond(double v, double threshold, Mode mode)
{
    return mode == Mode::Below ? v < threshold : v > threshold;
}

double excess(double v, double threshold, Mode mode)
{
    return mode == Mode::Below ? threshold - v : v - threshold;
}

constexpr double kEulerGamma = 0.57721566490153286;

}  // namespace

std::vector<Event> extract_events(std::span<const HourStamp> ts, std::span<const double> values, double threshold,
                                  Mode mode, int inter_event_h)
{
    if (values.empty()) throw InputError("event extraction: empty series");
    if (ts.size() != values.size())
        throw InputError(fmt::format("event extraction: {} timestamps but {} values", ts.size(), values.size()));
    if (inter_event_h < 0) throw InputError("event extraction: inter-event time must be >= 0");
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (!(ts[i - 1] < ts[i])) throw InputError("event extraction: timestamps must be strictly increasing");

    struct Run {
        std::size_t first, last;  // inclusive indices of beyond-threshold hours
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!beyond(values[i], threshold, mode)) continue;
        const bool continues = !runs.empty() && runs.back().last + 1 == i && ts[i] - ts[i - 1] == 1;
        if (continues)
            runs.back().last = i;
        else
            runs.push_back(Run{i, i});
    }

    std::vector<Run> pooled;
    for (const Run& r : runs) {
        if (!pooled.empty()) {
            const std::int64_t gap = ts[r.first] - ts[pooled.back().last] - 1;
            if (gap < inter_event_h) {
                pooled.back().last = r.last;
                continue;
            }
        }
        pooled.push_back(r);
    }

    std::vector<Event> out;
    out.reserve(pooled.size());
    for (const Run& r : pooled) {
        Event e;
        e.start = ts[r.first];
        e.end = ts[r.last];
        e.duration_h = static_cast<int>(e.end - e.start + 1);
        e.year = event_year(e.start);
        e.intensity = values[r.first];
        for (std::size_t i = r.first; i <= r.last; ++i) {
            e.intensity = mode == Mode::Below ? std::min(e.intensity, values[i]) : std::max(e.intensity, values[i]);
            if (beyond(values[i], threshold, mode)) e.severity += excess(values[i], threshold, mode);
        }
        out.push_back(e);
    }
    return out;
}

std::map<int, Event> annual_series(std::span<const Event> events)
{
    std::map<int, Event> out;
    for (const Event& e : events) {
        auto [it, inserted] = out.try_emplace(e.year, e);
        if (!inserted && e.severity > it->second.severity) it->second = e;
    }
    return out;
}

std::map<int, double> severity_by_year(std::span<const Event> events, std::span<const HourStamp> ts,
                                       std::span<const double> values, double threshold, Mode mode)
{
    std::map<int, double> out;
    std::size_t i = 0;
    for (const Event& e : events) {
        double& acc = out[e.year];
        while (i < ts.size() && ts[i] < e.start) ++i;
        for (; i < ts.size() && ts[i] <= e.end; ++i)
            if (beyond(values[i], threshold, mode)) acc += excess(values[i], threshold, mode);
    }
    return out;
}

double GevFit::cdf(double x) const
{
    if (negated) x = -x;
    const double y = (x - location) / scale;
    if (shape == 0.0) return std::exp(-std::exp(-y));
    const double z = 1.0 + shape * y;
    if (z <= 0.0) return shape > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::pow(z, -1.0 / shape));
}

double GevFit::quantile(double p) const
{
    if (!(p > 0.0 && p < 1.0)) throw InputError("GEV quantile needs 0 < p < 1");
    const double w = -std::log(p);
    const double x = shape == 0.0 ? location - scale * std::log(w)
                                  : location + scale * (std::pow(w, -shape) - 1.0) / shape;
    return negated ? -x : x;
}

GevFit fit_gev(std::span<const double> values, bool minima)
{
    std::vector<double> x(values.begin(), values.end());
    for (double& v : x) {
        if (!std::isfinite(v)) throw InputError("GEV fit: non-finite value");
        if (minima) v = -v;
    }
    std::sort(x.begin(), x.end());
    std::set<double> uniq(x.begin(), x.end());
    if (uniq.size() < 2) throw NumericError("GEV fit: all sample values are equal");
    if (uniq.size() < 5) throw NumericError(fmt::format("GEV fit: {} distinct values, need at least 5", uniq.size()));

    const auto n = static_cast<double>(x.size());
    double b0 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto j = static_cast<double>(i);  // rank - 1
        b0 += x[i];
        b1 += j / (n - 1.0) * x[i];
        b2 += j * (j - 1.0) / ((n - 1.0) * (n - 2.0)) * x[i];
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;
    const double l1 = b0;
    const double l2 = 2.0 * b1 - b0;
    const double l3 = 6.0 * b2 - 6.0 * b1 + b0;
    if (!(l2 > 0.0)) throw NumericError("GEV fit: non-positive L-scale");
    const double t3 = l3 / l2;

    // Hosking's k (= -shape): solve t3 = 2(1 - 3^-k)/(1 - 2^-k) - 3.
    auto tau3 = [](double k) {
        if (std::abs(k) < 1e-9) return 2.0 * std::log(3.0) / std::log(2.0) - 3.0;
        return 2.0 * (-std::expm1(-k * std::log(3.0))) / (-std::expm1(-k * std::log(2.0))) - 3.0;
    };
    const double c = 2.0 / (3.0 + t3) - std::log(2.0) / std::log(3.0);
    double k = 7.8590 * c + 2.9554 * c * c;
    for (int iter = 0; iter < 50; ++iter) {
        const double h = 1e-6;
        const double g = tau3(k) - t3;
        const double dg = (tau3(k + h) - tau3(k - h)) / (2.0 * h);
        if (dg == 0.0 || !std::isfinite(dg)) break;
        const double step = g / dg;
        k -= step;
        if (std::abs(step) < 1e-13) break;
    }
    if (!(k > -1.0) || !std::isfinite(k)) throw NumericError(fmt::format("GEV fit: L-skewness {} out of range", t3));

    GevFit fit;
    fit.sample_size = x.size();
    fit.negated = minima;
    if (std::abs(k) < 1e-9) {
        fit.scale = l2 / std::log(2.0);
        fit.location = l1 - kEulerGamma * fit.scale;
        fit.shape = 0.0;
    } else {
        const double g = std::tgamma(1.0 + k);
        fit.scale = l2 * k / ((-std::expm1(-k * std::log(2.0))) * g);
        fit.location = l1 - fit.scale * (1.0 - g) / k;
        fit.shape = -k;
    }
    if (!(fit.scale > 0.0)) throw NumericError("GEV fit: non-positive scale");
    return fit;
}

double return_period(const GevFit& fit, double value)
{
    double x = fit.negated ? -value : value;
    const double y = (x - fit.location) / fit.scale;
    double survival = 0.0;  // 1 - F
    if (fit.shape == 0.0) {
        survival = -std::expm1(-std::exp(-y));
    } else {
        const double z = 1.0 + fit.shape * y;
        if (z <= 0.0)
            survival = fit.shape > 0.0 ? 1.0 : 0.0;
        else
            survival = -std::expm1(-std::pow(z, -1.0 / fit.shape));
    }
    if (survival <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / survival;
}

TrendResult trend_test(std::span<const double> years, std::span<const double> values, double period_years)
{
    if (years.size() != values.size()) throw InputError("trend test: years and values differ in length");
    if (years.size() < 5) throw InputError(fmt::format("trend test: {} points, need at least 5", years.size()));
    std::vector<std::size_t> order(years.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return years[a] < years[b]; });
    std::vector<double> t, v;
    for (auto i : order) {
        t.push_back(years[i]);
        v.push_back(values[i]);
    }
    const std::size_t n = v.size();

    std::vector<double> slopes;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (t[j] != t[i]) slopes.push_back((v[j] - v[i]) / (t[j] - t[i]));
            s += (v[j] > v[i]) - (v[j] < v[i]);
        }
    }
    if (slopes.empty()) throw InputError("trend test: all points share one year");
    std::sort(slopes.begin(), slopes.end());
    const std::size_t m = slopes.size();
    const double median = m % 2 == 1 ? slopes[m / 2] : 0.5 * (slopes[m / 2 - 1] + slopes[m / 2]);

    std::vector<double> sorted_v = v;
    std::sort(sorted_v.begin(), sorted_v.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted_v[j] == sorted_v[i]) ++j;
        const auto g = static_cast<double>(j - i);
        tie_term += g * (g - 1.0) * (2.0 * g + 5.0);
        i = j;
    }
    const auto dn = static_cast<double>(n);
    const double var = (dn * (dn - 1.0) * (2.0 * dn + 5.0) - tie_term) / 18.0;
    double z = 0.0;
    if (var > 0.0) {
        if (s > 0) z = (s - 1.0) / std::sqrt(var);
        if (s < 0) z = (s + 1.0) / std::sqrt(var);
    }

    TrendResult r;
    r.events = n;
    r.slope_yearly = median;
    r.slope_period = median * period_years;
    r.mk_s = s;
    r.mk_z = z;
    r.p_value = std::clamp(std::erfc(std::abs(z) / std::numbers::sqrt2), 0.0, 1.0);
    return r;
}

std::vector<TrendResult> frost_trend_table(const std::map<int, double>& annual_minima,
                                           std::span<const double> thresholds, double period_years)
{
    std::vector<TrendResult> rows;
    for (double thr : thresholds) {
        std::vector<double> years, mins;
        for (const auto& [y, m] : annual_minima) {
            if (m < thr) {
                years.push_back(y);
                mins.push_back(m);
            }
        }
        TrendResult r;
        if (years.size() >= 5) {
            r = trend_test(years, mins, period_years);
        } else {
            r.events = years.size();
            r.slope_yearly = r.slope_period = r.p_value = std::numeric_limits<double>::quiet_NaN();
        }
        r.threshold_c = thr;
        rows.push_back(r);
    }
    return rows;
}

double mean_temp_trend(std::span<const double> years, std::span<const double> means)
{
    if (years.size() != means.size()) throw InputError("mean trend: years and values differ in length");
    if (years.size() < 5) throw InputError(fmt::format("mean trend: {} points, need at least 5", years.size()));
    const auto n = static_cast<double>(years.size());
    const double ty = std::accumulate(years.begin(), years.end(), 0.0) / n;
    const double tm = std::accumulate(means.begin(), means.end(), 0.0) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < years.size(); ++i) {
        sxy += (years[i] - ty) * (means[i] - tm);
        sxx += (years[i] - ty) * (years[i] - ty);
    }
    if (sxx == 0.0) throw InputError("mean trend: all points share one year");
    return sxy / sxx;
}

}  // namespace winterrisk::events
