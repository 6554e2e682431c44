#pragma once

#include "winterrisk/time.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace winterrisk::events {

enum class Mode {
    Below,  // frost: value < threshold
    Above,  // power deficit: value > threshold
};

/// A pooled run beyond the threshold.
///
/// intensity: minimum value (Below) or maximum value (Above) over the span.
/// severity: sum of |value - threshold| over the beyond-threshold hours only,
/// in value-units times hours (degC*h or GWh).
struct Event {
    HourStamp start;
    HourStamp end;  // inclusive
    int duration_h = 0;
    double intensity = 0.0;
    double severity = 0.0;
    int year = 0;  // event-year of `start`
};

/// Theory of runs with pooling: maximal runs beyond the threshold that are
/// separated by fewer than `inter_event_h` non-beyond hours are merged.
/// Timestamps must be strictly increasing; a jump of more than one hour
/// counts its missing hours as a gap.
std::vector<Event> extract_events(std::span<const HourStamp> timestamps, std::span<const double> values,
                                  double threshold, Mode mode, int inter_event_h = 24);

/// Largest-severity event of each event-year (earliest on ties). Years
/// without an event are absent.
std::map<int, Event> annual_series(std::span<const Event> events);

/// Sum of the beyond-threshold contributions per event-year, accumulated
/// hour by hour in time order.
std::map<int, double> severity_by_year(std::span<const Event> events, std::span<const HourStamp> timestamps,
                                       std::span<const double> values, double threshold, Mode mode);

/// Generalized extreme value distribution
///   F(x) = exp(-(1 + shape*(x - location)/scale)^(-1/shape)),
/// with the Gumbel limit at shape = 0.
struct GevFit {
    double location = 0.0;
    double scale = 1.0;
    double shape = 0.0;
    std::string method = "l-moments";
    std::size_t sample_size = 0;
    /// Set when the sample held minima; the fit then describes the negated
    /// values and cdf/return_period negate their argument.
    bool negated = false;

    double cdf(double x) const;
    double quantile(double p) const;
};

/// L-moment estimates from probability-weighted moments. Needs at least five
/// distinct values. Pass minima = true for series whose extremes are lows.
GevFit fit_gev(std::span<const double> values, bool minima = false);

/// T = 1 / (1 - F(value)); +infinity when F(value) == 1.
double return_period(const GevFit& fit, double value);

struct TrendResult {
    double threshold_c = 0.0;
    std::size_t events = 0;
    double slope_yearly = 0.0;
    double slope_period = 0.0;  // slope_yearly * period_years
    double p_value = 1.0;
    double mk_s = 0.0;
    double mk_z = 0.0;
};

/// Theil-Sen slope with a two-sided Mann-Kendall test (normal approximation,
/// tie-corrected variance, continuity correction).
TrendResult trend_test(std::span<const double> years, std::span<const double> values, double period_years = 71.0);

/// Trend of annual minima restricted, per threshold, to years whose minimum
/// lies below that threshold.
std::vector<TrendResult> frost_trend_table(const std::map<int, double>& annual_minima,
                                           std::span<const double> thresholds, double period_years = 71.0);

/// Ordinary least-squares slope of annual means on year.
double mean_temp_trend(std::span<const double> years, std::span<const double> annual_means);

}  // namespace winterrisk::events
