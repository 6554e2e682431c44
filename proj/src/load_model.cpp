#include "winterrisk/load_model.hpp"

#include "winterrisk/error.hpp"
#include "winterrisk/kvfile.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

namespace winterrisk::load {

namespace {

constexpr double kSeasonalPeriodHours = 8760.0;

/// Design column -> coefficient index.
constexpr std::array<std::size_t, kDesignColumns> kColumnToCoef = [] {
    std::array<std::size_t, kDesignColumns> m{};
    m[0] = coef::intercept;
    for (std::size_t d = 0; d < 6; ++d) m[1 + d] = coef::dow_first + d;
    for (std::size_t h = 1; h < 24; ++h) m[6 + h] = coef::hod_first + h;
    m[30] = coef::holiday;
    m[31] = coef::season_sin;
    m[32] = coef::season_cos;
    m[33] = coef::temp;
    m[34] = coef::temp_power;
    return m;
}();

}  // namespace

const std::array<std::string, kCoefficientCount>& coefficient_names()
{
    static const auto names = [] {
        std::array<std::string, kCoefficientCount> n;
        n[coef::intercept] = "intercept";
        const char* days[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
        for (std::size_t d = 0; d < 7; ++d) n[coef::dow_first + d] = fmt::format("dow_{}", days[d]);
        for (std::size_t h = 0; h < 24; ++h) n[coef::hod_first + h] = fmt::format("hod_{:02d}", h);
        n[coef::holiday] = "holiday";
        n[coef::season_sin] = "season_sin";
        n[coef::season_cos] = "season_cos";
        n[coef::temp] = "temp";
        n[coef::temp_power] = "temp_pow";
        return n;
    }();
    return names;
}

Design build_design(std::span<const HourStamp> timestamps, std::span<const double> temps,
                    const HolidaySet& holidays, int temp_power)
{
    if (timestamps.size() != temps.size())
        throw InputError(fmt::format("design: {} timestamps but {} temperatures", timestamps.size(), temps.size()));
    if (temp_power < 2) throw InputError("design: temperature power must be at least 2");
    Design d;
    d.temp_power = temp_power;
    d.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(timestamps.size()), kDesignColumns);
    for (std::size_t r = 0; r < timestamps.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        const HourStamp s = timestamps[r];
        const int dow = day_of_week(s);
        const auto hod = static_cast<int>(to_civil(s).hour);
        const double h = std::min(hour_of_year(s), 8760);
        const double t = temps[r];
        d.x(row, 0) = 1.0;
        if (dow < 6) d.x(row, 1 + dow) = 1.0;
        if (hod > 0) d.x(row, 6 + hod) = 1.0;
        d.x(row, 30) = holidays.contains(to_date(s)) ? 1.0 : 0.0;
        d.x(row, 31) = std::sin(2.0 * std::numbers::pi * h / kSeasonalPeriodHours);
        d.x(row, 32) = std::cos(2.0 * std::numbers::pi * h / kSeasonalPeriodHours);
        d.x(row, 33) = t;
        d.x(row, 34) = std::pow(t, temp_power);
    }
    return d;
}

constexpr double kRankTolerance = 1e-10;

LoadModel fit(const Design& design, std::span<const double> load_gw, std::string training_label)
{
    const Eigen::MatrixXd& x = design.x;
    if (x.cols() != static_cast<Eigen::Index>(kDesignColumns))
        throw InputError(fmt::format("fit: design has {} columns, expected {}", x.cols(), kDesignColumns));
    if (static_cast<std::size_t>(x.rows()) != load_gw.size())
        throw InputError(fmt::format("fit: design has {} rows but load has {} values", x.rows(), load_gw.size()));
    if (x.rows() < x.cols())
        throw NumericError(fmt::format("fit: {} observations for {} regressors", x.rows(), x.cols()));

    // Equilibrate columns so the rank decision does not depend on units.
    Eigen::VectorXd scale = x.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < scale.size(); ++c) {
        if (scale(c) == 0.0)
            throw NumericError(fmt::format("fit: regressor '{}' is identically zero",
                                           coefficient_names()[kColumnToCoef[static_cast<std::size_t>(c)]]));
    }
    const Eigen::MatrixXd xs = x * scale.cwiseInverse().asDiagonal();
    const Eigen::Map<const Eigen::VectorXd> y(load_gw.data(), static_cast<Eigen::Index>(load_gw.size()));

    // Eigen's default threshold (eps * columns) sits below the rounding
    // error of thousands of rows, so exact collinearity would pass.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs.rows(), xs.cols());
    qr.setThreshold(kRankTolerance);
    qr.compute(xs);
    if (qr.rank() < xs.cols())
        throw NumericError(fmt::format("fit: design is rank deficient (rank {} of {})", qr.rank(), xs.cols()));
    const Eigen::VectorXd b = qr.solve(y).cwiseQuotient(scale);

    LoadModel m;
    m.temp_power = design.temp_power;
    m.training_label = std::move(training_label);
    for (std::size_t c = 0; c < kDesignColumns; ++c) m.beta[kColumnToCoef[c]] = b(static_cast<Eigen::Index>(c));

    const Eigen::VectorXd resid = y - x * b;
    const double ssr = resid.squaredNorm();
    const double sst = (y.array() - y.mean()).matrix().squaredNorm();
    m.observations = load_gw.size();
    m.rmse_gw = std::sqrt(ssr / static_cast<double>(load_gw.size()));
    m.r2 = sst > 0.0 ? 1.0 - ssr / sst : (ssr <= 1e-20 * std::max(1.0, y.squaredNorm()) ? 1.0 : 0.0);
    return m;
}

std::vector<double> predict(const LoadModel& model, const Design& design)
{
    if (design.x.cols() != static_cast<Eigen::Index>(kDesignColumns))
        throw InputError(fmt::format("predict: design has {} columns, expected {}", design.x.cols(), kDesignColumns));
    if (design.temp_power != model.temp_power)
        throw InputError(fmt::format("predict: design uses t^{} but the model was fitted with t^{}",
                                     design.temp_power, model.temp_power));
    Eigen::VectorXd b(kDesignColumns);
    for (std::size_t c = 0; c < kDesignColumns; ++c) b(static_cast<Eigen::Index>(c)) = model.beta[kColumnToCoef[c]];
    const Eigen::VectorXd yhat = design.x * b;
    std::vector<double> out(yhat.data(), yhat.data() + yhat.size());
    for (double v : out)
        if (!std::isfinite(v)) throw NumericError("predict: non-finite demand");
    return out;
}

double residual_orthogonality(const LoadModel& model, const Design& design, std::span<const double> load_gw)
{
    const auto pred = predict(model, design);
    Eigen::VectorXd r(static_cast<Eigen::Index>(load_gw.size()));
    for (std::size_t i = 0; i < load_gw.size(); ++i) r(static_cast<Eigen::Index>(i)) = load_gw[i] - pred[i];
    // |x_c . r| / (|x_c| |r|), worst column
    double worst = 0.0;
    for (Eigen::Index c = 0; c < design.x.cols(); ++c) {
        const double cn = design.x.col(c).norm();
        if (cn == 0.0) continue;
        worst = std::max(worst, std::abs(design.x.col(c).dot(r)) / (cn * std::max(r.norm(), 1e-300)));
    }
    return worst;
}

std::vector<std::size_t> winter_rows(std::span<const HourStamp> timestamps)
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < timestamps.size(); ++i)
        if (is_winter(timestamps[i])) rows.push_back(i);
    return rows;
}

HolidaySet read_holidays(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    HolidaySet out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.insert(parse_date(line));
        } catch (const InputError& e) {
            throw InputError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
        }
    }
    return out;
}

void write_model(const std::filesystem::path& path, const LoadModel& m)
{
    std::vector<std::pair<std::string, std::string>> kvs;
    kvs.emplace_back("training_label", m.training_label.empty() ? "unlabelled" : m.training_label);
    kvs.emplace_back("temp_power", std::to_string(m.temp_power));
    kvs.emplace_back("observations", std::to_string(m.observations));
    kvs.emplace_back("rmse_gw", kv::exact(m.rmse_gw));
    kvs.emplace_back("r2", kv::exact(m.r2));
    for (std::size_t i = 0; i < kCoefficientCount; ++i)
        kvs.emplace_back(fmt::format("beta_{:02d}_{}", i, coefficient_names()[i]), kv::exact(m.beta[i]));
    kv::write(path, kvs, "winter demand regression, GW per unit regressor");
}

LoadModel read_model(const std::filesystem::path& path)
{
    const auto tree = kv::read(path);
    const std::string src = path.string();
    LoadModel m;
    m.training_label = kv::text(tree, "training_label", src);
    m.temp_power = static_cast<int>(kv::number(tree, "temp_power", src));
    m.observations = static_cast<std::size_t>(kv::number(tree, "observations", src));
    m.rmse_gw = kv::number(tree, "rmse_gw", src);
    m.r2 = kv::number(tree, "r2", src);
    for (std::size_t i = 0; i < kCoefficientCount; ++i)
        m.beta[i] = kv::number(tree, fmt::format("beta_{:02d}_{}", i, coefficient_names()[i]), src);
    if (m.beta[coef::dow_reference] != 0.0 || m.beta[coef::hod_reference] != 0.0)
        throw InputError(fmt::format("{}: reference-level coefficients (Sunday, hour 0) must be 0", src));
    if (!(m.r2 <= 1.0)) throw InputError(fmt::format("{}: r2 above 1", src));
    return m;
}

}  // namespace winterrisk::load
