#pragma once

// Reference computations written independently of the library, used to
// check it on small or closed-form cases.

#include "winterrisk/time.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace winterrisk::oracle {

inline double annuity(double r, int n)
{
    return (1.0 - std::pow(1.0 + r, -n)) / r;
}

struct PooledEvent {
    std::size_t first = 0;
    std::size_t last = 0;
    double severity = 0.0;
    double intensity = 0.0;
};

/// Pooling by gap filling on a contiguous hourly series: every stretch of
/// non-beyond hours shorter than `inter_event_h` that has beyond hours on
/// both sides is marked as part of an event, then maximal marked stretches
/// are the events.
inline std::vector<PooledEvent> pooled_events(const std::vector<double>& v, double thr, bool below, int inter_event_h)
{
    const std::size_t n = v.size();
    std::vector<int> beyond(n), marked(n);
    for (std::size_t i = 0; i < n; ++i) beyond[i] = below ? (v[i] < thr) : (v[i] > thr);
    marked = beyond;
    std::size_t i = 0;
    while (i < n) {
        if (beyond[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && !beyond[j]) ++j;
        const bool inside = i > 0 && j < n;
        if (inside && static_cast<int>(j - i) < inter_event_h)
            for (std::size_t k = i; k < j; ++k) marked[k] = 1;
        i = j;
    }
    std::vector<PooledEvent> out;
    for (std::size_t k = 0; k < n;) {
        if (!marked[k]) {
            ++k;
            continue;
        }
        PooledEvent e{k, k, 0.0, v[k]};
        while (k < n && marked[k]) {
            e.last = k;
            if (beyond[k]) e.severity += below ? thr - v[k] : v[k] - thr;
            e.intensity = below ? std::min(e.intensity, v[k]) : std::max(e.intensity, v[k]);
            ++k;
        }
        out.push_back(e);
    }
    return out;
}

/// Inverse-CDF draws from GEV(loc, scale, shape) with
/// F(x) = exp(-(1 + shape (x - loc) / scale)^(-1/shape)).
inline std::vector<double> gev_sample(double loc, double scale, double shape, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) {
        double p = u(gen);
        while (p <= 0.0) p = u(gen);
        const double w = -std::log(p);
        v = shape == 0.0 ? loc - scale * std::log(w) : loc + scale * (std::pow(w, -shape) - 1.0) / shape;
    }
    return x;
}

/// Exact four-segment outage episode: `pre` hours at `base_pre` above the
/// onset temperature, a jump to `plateau` for `full` cold hours, then a
/// decline of `slope` per hour once warm, flattening at `base_post` for at
/// least `tail` hours.
struct SegmentEpisode {
    std::vector<double> outage;
    std::vector<double> temps;
    std::size_t onset = 0;
    std::size_t recovery = 0;
};

inline SegmentEpisode four_segment(double base_pre, double plateau, double slope, double base_post, int pre, int full,
                                   int tail, double onset_temp, double recovery_temp)
{
    SegmentEpisode e;
    for (int i = 0; i < pre; ++i) {
        e.outage.push_back(base_pre);
        e.temps.push_back(recovery_temp + 5.0 - 0.1 * i);
    }
    e.onset = e.outage.size();
    for (int i = 0; i < full; ++i) {
        e.outage.push_back(plateau);
        e.temps.push_back(i == 0 ? onset_temp : onset_temp - 3.0 + 0.01 * i);
    }
    e.recovery = e.outage.size();
    for (int k = 1;; ++k) {
        const double v = plateau - slope * k;
        if (v <= base_post) break;
        e.outage.push_back(v);
        e.temps.push_back(recovery_temp + 1.0 + 0.05 * k);
    }
    for (int i = 0; i < tail; ++i) {
        e.outage.push_back(base_post);
        e.temps.push_back(recovery_temp + 6.0);
    }
    return e;
}

}  // namespace winterrisk::oracle
