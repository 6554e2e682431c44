#include "support.hpp"

#include "winterrisk/deficit.hpp"
#include "winterrisk/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace winterrisk;
using namespace winterrisk::deficit;
using outage::OutageModel;

namespace {

OutageModel model(Technology t, double onset, double plateau, double slope)
{
    OutageModel m;
    m.technology = t;
    m.onset_temp_c = onset;
    m.plateau_gw = plateau;
    m.recovery_slope_gw_per_h = slope;
    return m;
}

/// Flat load model: demand = intercept + temp * t.
load::LoadModel flat_load(double intercept, double per_degree)
{
    load::LoadModel m;
    m.beta[load::coef::intercept] = intercept;
    m.beta[load::coef::temp] = per_degree;
    return m;
}

struct Scenario {
    SystemConfig cfg;
    WeatherInputs inputs;
};

/// Two complete winters with a cold spell in the second.
Scenario two_winters()
{
    Scenario s;
    s.cfg.c_thermal_gw = 60;
    s.cfg.c_wind_gw = 30;
    s.cfg.models[Technology::Gas] = model(Technology::Gas, -8, 20, 0.5);
    s.cfg.models[Technology::WindNorth] = model(Technology::WindNorth, -6, 5, 0.5);
    const auto ts = testkit::hours_from({2019, 11, 1, 0}, 24 * 520);
    std::vector<double> temps(ts.size(), 5.0);
    const auto cold = static_cast<std::size_t>(to_stamp({2021, 1, 10, 0}) - ts.front());
    for (std::size_t k = 0; k < 72; ++k) temps[cold + k] = -12.0;
    s.inputs.population = {ts, temps, "pop"};
    s.inputs.plant_temps[Technology::Gas] = {ts, temps, "gas"};
    s.inputs.plant_temps[Technology::WindNorth] = {ts, temps, "wind-north"};
    s.inputs.wind_gen_gw.assign(ts.size(), 9.0);
    return s;
}

}  // namespace

TEST(Capacity, CombinesThermalAndScaledWind)
{
    SystemConfig cfg;
    cfg.c_thermal_gw = 62;
    cfg.c_wind_gw = 35;
    OutageSeries o{{Technology::Gas, {0, 10}},
                   {Technology::Coal, {0, 2}},
                   {Technology::WindNorth, {0, 7}},
                   {Technology::WindSouth, {0, 0}}};
    const std::vector<double> wind{14, 14};
    const auto c = available_capacity(cfg, o, wind);
    EXPECT_DOUBLE_EQ(c[0], 76.0);
    EXPECT_DOUBLE_EQ(c[1], 62 - 10 - 2 + 14 * 28.0 / 35.0);
}

TEST(Capacity, Errors)
{
    SystemConfig cfg;
    cfg.c_wind_gw = 10;
    const std::vector<double> wind{1, 1};
    EXPECT_THROW(available_capacity(cfg, {{Technology::Gas, {0}}}, wind), InputError);
    EXPECT_THROW(available_capacity(cfg, {{Technology::WindNorth, {6, 6}}, {Technology::WindSouth, {5, 5}}}, wind),
                 InputError);
}

TEST(Deficit, TiesCountAsDeficitHoursWithZeroEnergy)
{
    const auto ts = testkit::hours_from({2021, 1, 1, 0}, 4);
    const std::vector<double> demand{50, 60, 70, 40};
    const std::vector<double> cap{60, 60, 65, 45};
    const auto d = capacity_deficit(ts, demand, cap);
    EXPECT_EQ(d.deficit_gw, (std::vector<double>{-10, 0, 5, -5}));
    ASSERT_EQ(d.annual.size(), 1u);
    EXPECT_EQ(d.annual[0].year, 2021);
    EXPECT_EQ(d.annual[0].total_gwh, 5.0);
    EXPECT_EQ(d.annual[0].peak_gw, 5.0);
    EXPECT_EQ(d.annual[0].deficit_hours, 2);
    EXPECT_EQ(d.lost_load_gw(0), 0.0);
    EXPECT_EQ(d.lost_load_gw(2), 5.0);
}

TEST(Deficit, SurplusEverywhereGivesZero)
{
    const auto ts = testkit::hours_from({2021, 1, 1, 0}, 10);
    const std::vector<double> demand(10, 40.0), cap(10, 70.0);
    const auto d = capacity_deficit(ts, demand, cap);
    EXPECT_EQ(d.total_gwh(), 0.0);
    EXPECT_EQ(d.annual[0].deficit_hours, 0);
}

TEST(Deficit, DecemberCountsTowardsNextSeason)
{
    const auto ts = testkit::hours_from({2020, 12, 31, 22}, 4);
    const std::vector<double> demand(4, 10.0), cap(4, 9.0);
    const auto d = capacity_deficit(ts, demand, cap);
    ASSERT_EQ(d.annual.size(), 1u);
    EXPECT_EQ(d.annual[0].year, 2021);
    EXPECT_EQ(d.annual[0].total_gwh, 4.0);
}

TEST(Deficit, LengthMismatchThrows)
{
    const auto ts = testkit::hours_from({2021, 1, 1, 0}, 3);
    EXPECT_THROW(capacity_deficit(ts, std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), InputError);
}

TEST(Winterization, LowersPlateauAndFloorsAtZero)
{
    SystemConfig cfg;
    cfg.models[Technology::Gas] = model(Technology::Gas, -8, 20, 1);
    EXPECT_EQ(apply_winterization(cfg, {Technology::Gas, 5}).models.at(Technology::Gas).plateau_gw, 15.0);
    EXPECT_EQ(apply_winterization(cfg, {Technology::Gas, 25}).models.at(Technology::Gas).plateau_gw, 0.0);
    EXPECT_EQ(apply_winterization(cfg, {Technology::Gas, 0}).models.at(Technology::Gas).plateau_gw, 20.0);
    EXPECT_THROW(apply_winterization(cfg, {Technology::Coal, 1}), InputError);
    EXPECT_THROW(apply_winterization(cfg, {Technology::Gas, -1}), InputError);
}

TEST(RunYears, OnlyCompleteSeasonsAndColdSpellCreatesDeficit)
{
    auto s = two_winters();
    const auto r = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {});
    ASSERT_EQ(r.deficits.annual.size(), 2u);  // 2020 and 2021
    EXPECT_EQ(r.deficits.annual[0].year, 2020);
    EXPECT_EQ(r.deficits.annual[0].total_gwh, 0.0);
    EXPECT_EQ(r.deficits.annual[1].year, 2021);
    EXPECT_GT(r.deficits.annual[1].total_gwh, 0.0);
    const auto hours_2020 = to_stamp({2020, 3, 1, 0}) - to_stamp({2019, 12, 1, 0});
    EXPECT_EQ(static_cast<std::int64_t>(r.deficits.timestamps.size()),
              hours_2020 + (to_stamp({2021, 3, 1, 0}) - to_stamp({2020, 12, 1, 0})));

    // cold hour: demand 61, capacity 60 - 20 + 9 * 25/30 = 47.5
    const auto k = static_cast<std::size_t>(
        std::find(r.deficits.timestamps.begin(), r.deficits.timestamps.end(), to_stamp({2021, 1, 10, 5})) -
        r.deficits.timestamps.begin());
    EXPECT_DOUBLE_EQ(r.demand_gw[k], 61.0);
    EXPECT_DOUBLE_EQ(r.capacity_gw[k], 47.5);
}

TEST(RunYears, PartialSeasonsAreDroppedUnlessRequested)
{
    auto s = two_winters();
    // cut the series inside the second winter
    const auto cut = static_cast<std::size_t>(to_stamp({2021, 2, 1, 0}) - s.inputs.population.timestamps.front());
    for (auto* v : {&s.inputs.population, &s.inputs.plant_temps[Technology::Gas],
                    &s.inputs.plant_temps[Technology::WindNorth]}) {
        v->timestamps.resize(cut);
        v->values.resize(cut);
    }
    s.inputs.wind_gen_gw.resize(cut);
    EXPECT_EQ(run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}).deficits.annual.size(), 1u);
    EXPECT_EQ(run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}, {}, RunOptions{1, false}).deficits.annual.size(), 2u);
}

TEST(RunYears, IdenticalAcrossThreadCounts)
{
    auto s = two_winters();
    const auto a = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}, {}, RunOptions{1, true});
    const auto b = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}, {}, RunOptions{4, true});
    EXPECT_EQ(a.deficits.deficit_gw, b.deficits.deficit_gw);
    EXPECT_EQ(a.demand_gw, b.demand_gw);
    EXPECT_EQ(a.capacity_gw, b.capacity_gw);
}

TEST(RunYears, ZeroWinterizationEqualsNone)
{
    auto s = two_winters();
    const WinterizationScenario zero{Technology::Gas, 0.0};
    const auto a = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {});
    const auto b = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}, std::span(&zero, 1));
    EXPECT_EQ(a.deficits.deficit_gw, b.deficits.deficit_gw);
}

TEST(RunYears, DeficitNonIncreasingInWinterizedCapacity)
{
    auto s = two_winters();
    double prev = std::numeric_limits<double>::infinity();
    for (double w = 0; w <= 22; w += 1) {
        const WinterizationScenario sc{Technology::Gas, w};
        const double t = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}, std::span(&sc, 1)).deficits.total_gwh();
        EXPECT_LE(t, prev) << w;
        prev = t;
    }
}

TEST(RunYears, FullWinterizationWithAmpleCapacityRemovesDeficit)
{
    auto s = two_winters();
    const std::vector<WinterizationScenario> all{{Technology::Gas, 100}, {Technology::WindNorth, 100}};
    const auto r = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}, all);
    EXPECT_EQ(r.deficits.total_gwh(), 0.0);
}

TEST(RunYears, MisalignedInputsThrow)
{
    auto s = two_winters();
    auto bad = s.inputs;
    bad.plant_temps[Technology::Gas].timestamps.pop_back();
    bad.plant_temps[Technology::Gas].values.pop_back();
    EXPECT_THROW(run_years(s.cfg, bad, flat_load(55, 0), {}), InputError);
    bad = s.inputs;
    bad.plant_temps.erase(Technology::WindNorth);
    EXPECT_THROW(run_years(s.cfg, bad, flat_load(55, 0), {}), InputError);
    bad = s.inputs;
    bad.wind_gen_gw[0] = 31;
    EXPECT_THROW(run_years(s.cfg, bad, flat_load(55, 0), {}), InputError);
}

TEST(Sweep, GridOrderAndMonotoneInOnset)
{
    auto s = two_winters();
    const std::vector<double> onset{1.5, -3, 0, 3, -1.5};
    const std::vector<double> rec{0};
    const auto table = sensitivity_sweep(s.cfg, s.inputs, flat_load(55, -0.5), {}, onset, rec, SweepScope::GasOnly);
    ASSERT_EQ(table.size(), 5u);
    for (std::size_t i = 1; i < table.size(); ++i) {
        EXPECT_LT(table[i - 1].d_onset_c, table[i].d_onset_c);
        EXPECT_LE(table[i - 1].total_gwh, table[i].total_gwh);
    }
    EXPECT_THROW(sensitivity_sweep(s.cfg, s.inputs, flat_load(55, -0.5), {}, {}, rec, SweepScope::GasOnly), InputError);
}

TEST(RunYears, ObservedOutagesReplaceSimulatedHours)
{
    auto s = two_winters();
    const auto base = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {});
    const HourStamp cold = to_stamp({2021, 1, 10, 5});
    s.inputs.observed_outages_gw[Technology::Gas][cold] = 0.0;
    s.inputs.observed_outages_gw[Technology::Gas][to_stamp({2020, 1, 5, 0})] = 3.0;
    const auto r = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {});
    const auto at = [&](HourStamp t) {
        return static_cast<std::size_t>(std::find(r.deficits.timestamps.begin(), r.deficits.timestamps.end(), t) -
                                        r.deficits.timestamps.begin());
    };
    EXPECT_DOUBLE_EQ(r.capacity_gw[at(cold)], base.capacity_gw[at(cold)] + 20.0);
    EXPECT_DOUBLE_EQ(r.capacity_gw[at(to_stamp({2020, 1, 5, 0}))], base.capacity_gw[at(to_stamp({2020, 1, 5, 0}))] - 3.0);
    EXPECT_DOUBLE_EQ(r.capacity_gw[at(cold) + 1], base.capacity_gw[at(cold) + 1]);

    // winterization leaves observed hours alone
    const WinterizationScenario w{Technology::Gas, 20};
    const auto rw = run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}, std::span(&w, 1));
    EXPECT_DOUBLE_EQ(rw.capacity_gw[at(to_stamp({2020, 1, 5, 0}))], r.capacity_gw[at(to_stamp({2020, 1, 5, 0}))]);

    s.inputs.observed_outages_gw[Technology::Coal][cold] = 1.0;
    EXPECT_THROW(run_years(s.cfg, s.inputs, flat_load(55, -0.5), {}), InputError);
}
