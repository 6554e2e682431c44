#include "support.hpp"

#include "winterrisk/error.hpp"
#include "winterrisk/load_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace winterrisk;
using namespace winterrisk::load;

namespace {

std::array<double, kCoefficientCount> sample_beta()
{
    std::array<double, kCoefficientCount> b{};
    b[coef::intercept] = 45.0;
    for (std::size_t d = 0; d < 6; ++d) b[coef::dow_first + d] = 1.0 + 0.1 * static_cast<double>(d);
    for (std::size_t h = 1; h < 24; ++h) b[coef::hod_first + h] = 3.0 * std::sin(static_cast<double>(h) / 4.0);
    b[coef::holiday] = -2.5;
    b[coef::season_sin] = -1.2;
    b[coef::season_cos] = 2.1;
    b[coef::temp] = -0.85;
    b[coef::temp_power] = 2e-5;
    return b;
}

struct Sample {
    std::vector<HourStamp> ts;
    std::vector<double> temps;
    HolidaySet holidays;
};

Sample winter_sample(std::uint64_t seed)
{
    Sample s;
    s.ts = testkit::winter_hours(2019, 2021);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 4.0);
    for (auto t : s.ts) {
        const double hod = to_civil(t).hour;
        s.temps.push_back(8.0 - 4.0 * std::cos(2 * std::numbers::pi * (hod - 6) / 24) + noise(gen));
    }
    s.holidays = {parse_date("2019-01-01"), parse_date("2019-12-25"), parse_date("2020-01-01"),
                  parse_date("2020-12-25"), parse_date("2021-01-01"), parse_date("2021-02-15")};
    return s;
}

std::vector<double> generate(const std::array<double, kCoefficientCount>& beta, const Design& d)
{
    LoadModel m;
    m.beta = beta;
    m.temp_power = d.temp_power;
    return predict(m, d);
}

}  // namespace

TEST(Design, ColumnLayout)
{
    // Monday 2021-02-15 07:00, a holiday
    const std::vector<HourStamp> ts{to_stamp({2021, 2, 15, 7}), to_stamp({2021, 2, 14, 0})};
    const std::vector<double> temps{-2.0, 3.0};
    const auto d = build_design(ts, temps, {parse_date("2021-02-15")});
    ASSERT_EQ(d.x.cols(), static_cast<Eigen::Index>(kDesignColumns));
    EXPECT_EQ(d.x(0, 0), 1.0);
    EXPECT_EQ(d.x(0, 1), 1.0);  // Monday
    EXPECT_EQ(d.x.row(0).segment(2, 5).sum(), 0.0);
    EXPECT_EQ(d.x(0, 6 + 7), 1.0);  // hour 7
    EXPECT_EQ(d.x(0, 30), 1.0);
    EXPECT_EQ(d.x(0, 33), -2.0);
    EXPECT_EQ(d.x(0, 34), 16.0);
    // Sunday midnight: every dummy at its reference level
    EXPECT_EQ(d.x.row(1).segment(1, 29).sum(), 0.0);
    EXPECT_EQ(d.x(1, 30), 0.0);
    const double h = hour_of_year(ts[1]);
    EXPECT_DOUBLE_EQ(d.x(1, 31), std::sin(2 * std::numbers::pi * h / 8760));
    EXPECT_DOUBLE_EQ(d.x(1, 32), std::cos(2 * std::numbers::pi * h / 8760));
}

TEST(Design, RejectsMismatchAndLowPower)
{
    const std::vector<HourStamp> ts{to_stamp({2021, 1, 1, 0})};
    EXPECT_THROW(build_design(ts, std::vector<double>{}, {}), InputError);
    EXPECT_THROW(build_design(ts, std::vector<double>{1.0}, {}, 1), InputError);
}

TEST(Fit, RecoversNoiselessCoefficients)
{
    const auto s = winter_sample(1);
    const auto d = build_design(s.ts, s.temps, s.holidays);
    const auto beta = sample_beta();
    const auto y = generate(beta, d);
    const auto m = fit(d, y, "test");
    for (std::size_t i = 0; i < kCoefficientCount; ++i)
        EXPECT_NEAR(m.beta[i], beta[i], 1e-6 * std::max(1.0, std::abs(beta[i]))) << coefficient_names()[i];
    EXPECT_EQ(m.beta[coef::dow_reference], 0.0);
    EXPECT_EQ(m.beta[coef::hod_reference], 0.0);
    EXPECT_LT(m.rmse_gw, 1e-9);
    EXPECT_NEAR(m.r2, 1.0, 1e-12);
    EXPECT_EQ(m.observations, s.ts.size());
    EXPECT_EQ(m.training_label, "test");
}

TEST(Fit, ResidualsAreOrthogonalToEveryRegressor)
{
    const auto s = winter_sample(2);
    const auto d = build_design(s.ts, s.temps, s.holidays);
    auto y = generate(sample_beta(), d);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> e(0.0, 1.5);
    for (double& v : y) v += e(gen);
    const auto m = fit(d, y);
    EXPECT_LT(residual_orthogonality(m, d, y), 1e-8);
    EXPECT_GT(m.r2, 0.5);
    EXPECT_LT(m.r2, 1.0);
    EXPECT_NEAR(m.rmse_gw, 1.5, 0.1);
}

TEST(Fit, ConstantRegressorIsRejected)
{
    // only hour 0 and 1 observed: hour dummies 2..23 are identically zero
    std::vector<HourStamp> ts;
    std::vector<double> temps;
    for (int day = 1; day <= 60; ++day)
        for (unsigned h = 0; h < 2; ++h) {
            ts.push_back(to_stamp({2021, 1, 1, h}) + (day - 1) * 24);
            temps.push_back(day * 0.1 + h);
        }
    const auto d = build_design(ts, temps, {});
    EXPECT_THROW(fit(d, std::vector<double>(ts.size(), 1.0)), NumericError);
}

TEST(Fit, CollinearDesignIsRankDeficient)
{
    // holiday dummy equal to the Monday dummy
    const auto s = winter_sample(4);
    HolidaySet mondays;
    for (auto t : s.ts)
        if (day_of_week(t) == 0) mondays.insert(to_date(t));
    const auto d = build_design(s.ts, s.temps, mondays);
    EXPECT_THROW(fit(d, generate(sample_beta(), d)), NumericError);
}

TEST(Fit, TooFewRowsAndShapeErrors)
{
    const auto s = winter_sample(5);
    const std::vector<HourStamp> few(s.ts.begin(), s.ts.begin() + 20);
    const std::vector<double> temps(s.temps.begin(), s.temps.begin() + 20);
    const auto d = build_design(few, temps, {});
    EXPECT_THROW(fit(d, std::vector<double>(20, 1.0)), NumericError);
    EXPECT_THROW(fit(d, std::vector<double>(19, 1.0)), InputError);
}

TEST(Predict, RejectsPowerMismatch)
{
    const auto s = winter_sample(6);
    LoadModel m;
    m.temp_power = 4;
    EXPECT_THROW(predict(m, build_design(s.ts, s.temps, {}, 2)), InputError);
}

TEST(Fit, HigherPowerFitsQuarticDataBetter)
{
    const auto s = winter_sample(7);
    const auto d4 = build_design(s.ts, s.temps, s.holidays, 4);
    const auto d2 = build_design(s.ts, s.temps, s.holidays, 2);
    const auto y = generate(sample_beta(), d4);
    EXPECT_LT(fit(d4, y).rmse_gw, fit(d2, y).rmse_gw);
}

TEST(WinterRows, SelectsDecemberToFebruary)
{
    const auto ts = testkit::hours_from({2020, 11, 30, 22}, 4);
    EXPECT_EQ(winter_rows(ts), (std::vector<std::size_t>{2, 3}));
}

TEST(ModelFile, RoundTripsExactly)
{
    const auto dir = testkit::scratch_dir("load-model");
    LoadModel m;
    m.beta = sample_beta();
    m.temp_power = 4;
    m.training_label = "pop";
    m.rmse_gw = 1.0 / 3.0;
    m.r2 = 0.987654321;
    m.observations = 6480;
    write_model(dir / "m.ini", m);
    const auto back = read_model(dir / "m.ini");
    EXPECT_EQ(back.beta, m.beta);
    EXPECT_EQ(back.rmse_gw, m.rmse_gw);
    EXPECT_EQ(back.r2, m.r2);
    EXPECT_EQ(back.observations, m.observations);
    EXPECT_EQ(back.training_label, "pop");
    const auto text = testkit::slurp(dir / "m.ini");
    EXPECT_NE(text.find("beta_36_temp_pow"), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 5 + 37);
}

TEST(ModelFile, RejectsNonzeroReference)
{
    const auto dir = testkit::scratch_dir("load-model-bad");
    LoadModel m;
    m.beta = sample_beta();
    m.beta[coef::dow_reference] = 0.5;
    write_model(dir / "m.ini", m);
    EXPECT_THROW(read_model(dir / "m.ini"), InputError);
}

TEST(Holidays, ReadsDatesAndComments)
{
    const auto dir = testkit::scratch_dir("holidays");
    testkit::spit(dir / "h.txt", "# list\n2021-01-01  # new year\n\n2021-02-15\n");
    const auto h = read_holidays(dir / "h.txt");
    EXPECT_EQ(h.size(), 2u);
    EXPECT_TRUE(h.contains(parse_date("2021-02-15")));
    testkit::spit(dir / "bad.txt", "2021-01-01\n2021-02-30\n");
    try {
        read_holidays(dir / "bad.txt");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.txt:2:"), std::string::npos) << e.what();
    }
}
