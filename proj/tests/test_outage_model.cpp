#include "oracles.hpp"
#include "support.hpp"

#include "winterrisk/error.hpp"
#include "winterrisk/outage_model.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace winterrisk;
using namespace winterrisk::outage;

namespace {

OutageModel gas_model()
{
    OutageModel m;
    m.technology = Technology::Gas;
    m.onset_temp_c = -8.8;
    m.plateau_gw = 14.0;
    m.recovery_temp_c = 0.0;
    m.recovery_slope_gw_per_h = 2.0;
    m.min_full_hours = 10;
    return m;
}

OutageEpisode episode_of(const oracle::SegmentEpisode& e)
{
    return OutageEpisode{e.outage, e.temps, Technology::Gas};
}

double total(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

TEST(Technology, NamesRoundTrip)
{
    for (Technology t : kAllTechnologies) EXPECT_EQ(parse_technology(to_string(t)), t);
    EXPECT_THROW(parse_technology("nuclear"), InputError);
    EXPECT_TRUE(is_wind(Technology::WindNorth));
    EXPECT_FALSE(is_wind(Technology::Coal));
}

TEST(FitOutage, RecoversExactFourSegmentEpisode)
{
    const auto e = oracle::four_segment(1.0, 18.0, 0.3, 2.0, 12, 40, 15, -8.8, 0.0);
    const auto m = fit_outage_model(episode_of(e));
    EXPECT_EQ(m.onset_temp_c, -8.8);
    EXPECT_NEAR(m.plateau_gw, 18.0, 1e-9);
    EXPECT_NEAR(m.recovery_slope_gw_per_h, 0.3, 0.3 * 1e-9);
    EXPECT_EQ(m.baseline_pre_gw, 1.0);
    EXPECT_EQ(m.baseline_post_gw, 2.0);
    EXPECT_EQ(m.recovery_temp_c, 0.0);
}

TEST(FitOutage, OnsetTiesResolveToEarliest)
{
    auto e = oracle::four_segment(0.0, 10.0, 0.5, 0.0, 6, 30, 12, -9.0, 0.0);
    // split the jump into two equal steps: onset at the first
    e.outage[e.onset] = 5.0;
    e.temps[e.onset] = -7.0;
    e.temps[e.onset + 1] = -9.5;
    const auto m = fit_outage_model(episode_of(e));
    EXPECT_EQ(m.onset_temp_c, -7.0);
    // plateau keeps the observed area over [onset, recovery)
    const double area = std::accumulate(e.outage.begin() + static_cast<long>(e.onset),
                                        e.outage.begin() + static_cast<long>(e.recovery), 0.0);
    EXPECT_NEAR(m.plateau_gw * static_cast<double>(e.recovery - e.onset), area, 1e-9);
}

TEST(FitOutage, SlopeWithinTwoPercentUnderSmallNoise)
{
    auto e = oracle::four_segment(0.5, 12.0, 0.4, 1.0, 10, 30, 20, -8.0, 0.0);
    std::mt19937_64 gen(17);
    std::normal_distribution<double> n(0.0, 0.02);
    for (std::size_t i = e.recovery; i < e.outage.size(); ++i) e.outage[i] = std::max(0.0, e.outage[i] + n(gen));
    const auto m = fit_outage_model(episode_of(e));
    EXPECT_NEAR(m.recovery_slope_gw_per_h, 0.4, 0.4 * 0.02);
}

TEST(FitOutage, ErrorCases)
{
    const auto good = oracle::four_segment(1.0, 18.0, 0.3, 2.0, 12, 40, 15, -8.8, 0.0);
    {
        auto e = episode_of(good);
        e.temps_c.pop_back();
        EXPECT_THROW(fit_outage_model(e), InputError);
    }
    {
        OutageEpisode e{std::vector<double>(10, 1.0), std::vector<double>(10, 1.0), Technology::Gas};
        EXPECT_THROW(fit_outage_model(e), InputError);
    }
    {
        OutageEpisode e{std::vector<double>(40, 3.0), std::vector<double>(40, -10.0), Technology::Gas};
        EXPECT_THROW(fit_outage_model(e), NumericError);  // never rises
    }
    {
        auto e = episode_of(good);
        for (double& t : e.temps_c) t = std::min(t, -1.0);
        EXPECT_THROW(fit_outage_model(e), NumericError);  // never recovers
    }
    {
        auto e = episode_of(good);
        e.outage_gw[3] = -1.0;
        EXPECT_THROW(fit_outage_model(e), InputError);
    }
    {
        // too short after recovery
        auto e = episode_of(good);
        e.outage_gw.resize(good.recovery + 5);
        e.temps_c.resize(good.recovery + 5);
        EXPECT_THROW(fit_outage_model(e), NumericError);
    }
}

TEST(SimulateOutage, HandTracedSequence)
{
    std::vector<double> temps{5, 5, -10, -10, -10};
    temps.resize(25, 5.0);
    const auto out = simulate_outages(gas_model(), temps);
    std::vector<double> expect{0, 0};
    expect.resize(12, 14.0);
    for (double v : {12.0, 10.0, 8.0, 6.0, 4.0, 2.0, 0.0}) expect.push_back(v);
    expect.resize(25, 0.0);
    EXPECT_EQ(out, expect);
}

TEST(SimulateOutage, ColdHoldsPlateauUntilWarmAboveRecovery)
{
    auto m = gas_model();
    std::vector<double> temps(30, -12.0);
    for (int i = 15; i < 30; ++i) temps[static_cast<std::size_t>(i)] = -1.0;  // above onset, below recovery
    const auto out = simulate_outages(m, temps);
    for (double v : out) EXPECT_EQ(v, 14.0);
}

TEST(SimulateOutage, ColdDuringDeclineRestoresPlateau)
{
    auto m = gas_model();
    std::vector<double> temps(12, -10.0);
    temps.resize(14, 5.0);   // decline to 12, 10
    temps.push_back(-10.0);  // cold again
    temps.resize(18, 5.0);
    const auto out = simulate_outages(m, temps);
    EXPECT_EQ(out[12], 12.0);
    EXPECT_EQ(out[13], 10.0);
    EXPECT_EQ(out[14], 14.0);
    EXPECT_EQ(out[15], 14.0);  // new minimum window starts at the re-entry
}

TEST(SimulateOutage, WarmSeriesHasNoOutage)
{
    const std::vector<double> temps(100, 3.0);
    for (double v : simulate_outages(gas_model(), temps)) EXPECT_EQ(v, 0.0);
}

TEST(SimulateOutage, BoundedByPlateau)
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> t(-15, 10);
    std::vector<double> temps(2000);
    for (double& v : temps) v = t(gen);
    for (double v : simulate_outages(gas_model(), temps)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 14.0);
    }
}

TEST(SimulateOutage, EnergyNonDecreasingInOnsetOnColdSpells)
{
    // property over V-shaped spells: a warmer onset never removes outage energy
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> depth(-16, -4), half(5, 60), base(2, 12);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> temps(20, base(gen));
        const double d = depth(gen);
        const int h = static_cast<int>(half(gen));
        const double b = temps.front();
        for (int k = -h; k <= h; ++k) temps.push_back(d + (b - d) * std::abs(k) / h);
        temps.resize(temps.size() + 80, b);
        double prev = -1.0;
        for (double shift : {-3.0, -1.5, 0.0, 1.5, 3.0}) {
            const double e = total(simulate_outages(shift_thresholds(gas_model(), shift, 0.0), temps));
            EXPECT_GE(e, prev) << "rep " << rep << " shift " << shift;
            prev = e;
        }
    }
}

TEST(ShiftThresholds, MovesBothAndKeepsOrdering)
{
    const auto m = shift_thresholds(gas_model(), 1.5, -0.5);
    EXPECT_DOUBLE_EQ(m.onset_temp_c, -7.3);
    EXPECT_DOUBLE_EQ(m.recovery_temp_c, -0.5);
    EXPECT_THROW(shift_thresholds(gas_model(), 9.0, 0.0), InputError);
}

TEST(OutageModelFile, RoundTripAndValidation)
{
    const auto dir = testkit::scratch_dir("outage-model");
    auto m = gas_model();
    m.plateau_gw = 17.123456789;
    m.baseline_post_gw = 0.25;
    write_model(dir / "gas.ini", m);
    const auto back = read_model(dir / "gas.ini");
    EXPECT_EQ(back.plateau_gw, m.plateau_gw);
    EXPECT_EQ(back.onset_temp_c, m.onset_temp_c);
    EXPECT_EQ(back.baseline_post_gw, 0.25);
    EXPECT_EQ(back.technology, Technology::Gas);
    m.recovery_slope_gw_per_h = 0.0;
    write_model(dir / "bad.ini", m);
    EXPECT_THROW(read_model(dir / "bad.ini"), InputError);
}

TEST(ReadEpisode, JoinsTechnologyRowsToTemperatures)
{
    const auto dir = testkit::scratch_dir("episode");
    testkit::spit(dir / "o.csv",
                  "timestamp,tech,outage_gw\n2021-02-14T00:00,gas,1\n2021-02-14T00:00,coal,2\n"
                  "2021-02-14T01:00,gas,3\n2021-02-14T02:00,gas,4\n");
    weather::WeightedTemperatureSeries temps{testkit::hours_from({2021, 2, 13, 23}, 5), {0, -1, -2, -3, -4}, "gas"};
    const auto e = read_episode(dir / "o.csv", temps, Technology::Gas);
    EXPECT_EQ(e.outage_gw, (std::vector<double>{1, 3, 4}));
    EXPECT_EQ(e.temps_c, (std::vector<double>{-1, -2, -3}));
    EXPECT_THROW(read_episode(dir / "o.csv", temps, Technology::WindNorth), InputError);
    testkit::spit(dir / "gap.csv", "timestamp,tech,outage_gw\n2021-02-14T00:00,gas,1\n2021-02-14T02:00,gas,3\n");
    EXPECT_THROW(read_episode(dir / "gap.csv", temps, Technology::Gas), InputError);
}

TEST(ReadObservedOutages, GroupsByTechnology)
{
    const auto dir = testkit::scratch_dir("observed");
    testkit::spit(dir / "o.csv", "timestamp,tech,outage_gw\n2021-02-15T06:00Z,gas,20.1\n2021-02-15T06:00Z,coal,5\n"
                                 "2021-02-15T07:00Z,gas,19\n");
    const auto o = read_observed_outages(dir / "o.csv", UtcOffsetTable(-6));
    ASSERT_EQ(o.size(), 2u);
    EXPECT_EQ(o.at(Technology::Gas).size(), 2u);
    EXPECT_EQ(o.at(Technology::Gas).at(to_stamp({2021, 2, 15, 0})), 20.1);
    EXPECT_EQ(o.at(Technology::Coal).at(to_stamp({2021, 2, 15, 0})), 5.0);
    testkit::spit(dir / "dup.csv", "timestamp,tech,outage_gw\n2021-02-15T06:00,gas,1\n2021-02-15T06:00,gas,2\n");
    EXPECT_THROW(read_observed_outages(dir / "dup.csv"), InputError);
    testkit::spit(dir / "tech.csv", "timestamp,tech,outage_gw\n2021-02-15T06:00,hydro,1\n");
    EXPECT_THROW(read_observed_outages(dir / "tech.csv"), InputError);
    testkit::spit(dir / "neg.csv", "timestamp,tech,outage_gw\n2021-02-15T06:00,gas,-1\n");
    EXPECT_THROW(read_observed_outages(dir / "neg.csv"), InputError);
}
