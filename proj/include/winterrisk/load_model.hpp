#pragma once

#include "winterrisk/time.hpp"
#include "winterrisk/weather.hpp"

#include <Eigen/Dense>

#include <array>
#include <chrono>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace winterrisk::load {

/// Number of coefficients in the demand equation, including the two
/// reference-level dummies (Sunday, hour 0) that are pinned to zero.
inline constexpr std::size_t kCoefficientCount = 37;

/// Estimable columns: intercept, Mon..Sat, hour 1..23, holiday, sin, cos,
/// t, t^power.
inline constexpr std::size_t kDesignColumns = 35;

/// Coefficient index layout:
///   0        intercept
///   1..7     day of week, Monday..Sunday (7 = Sunday, reference, fixed 0)
///   8..31    hour of day 0..23           (8 = hour 0, reference, fixed 0)
///   32       holiday
///   33, 34   sin / cos of 2*pi*h/8760
///   35       temperature
///   36       temperature^power (power 4 unless stated otherwise)
namespace coef {
inline constexpr std::size_t intercept = 0;
inline constexpr std::size_t dow_first = 1;
inline constexpr std::size_t dow_reference = 7;
inline constexpr std::size_t hod_first = 8;
inline constexpr std::size_t hod_reference = 8;
inline constexpr std::size_t holiday = 32;
inline constexpr std::size_t season_sin = 33;
inline constexpr std::size_t season_cos = 34;
inline constexpr std::size_t temp = 35;
inline constexpr std::size_t temp_power = 36;
}  // namespace coef

const std::array<std::string, kCoefficientCount>& coefficient_names();

using HolidaySet = std::set<std::chrono::sys_days>;

struct Design {
    Eigen::MatrixXd x;  // rows = hours, cols = kDesignColumns
    int temp_power = 4;
};

Design build_design(std::span<const HourStamp> timestamps, std::span<const double> temps,
                    const HolidaySet& holidays, int temp_power = 4);

struct LoadModel {
    std::array<double, kCoefficientCount> beta{};
    int temp_power = 4;
    std::string training_label;
    double rmse_gw = 0.0;
    double r2 = 0.0;
    std::size_t observations = 0;
};

/// Ordinary least squares by column-pivoted Householder QR. Throws
/// NumericError on rank deficiency or an all-zero column.
LoadModel fit(const Design& design, std::span<const double> load_gw, std::string training_label = {});

std::vector<double> predict(const LoadModel& model, const Design& design);

/// Worst-column |x_c . r| / (|x_c| |r|) for the residuals r of `model`.
double residual_orthogonality(const LoadModel& model, const Design& design, std::span<const double> load_gw);

/// Keeps only December-February hours.
std::vector<std::size_t> winter_rows(std::span<const HourStamp> timestamps);

HolidaySet read_holidays(const std::filesystem::path& path);

void write_model(const std::filesystem::path& path, const LoadModel& model);
LoadModel read_model(const std::filesystem::path& path);

}  // namespace winterrisk::load
