#pragma once

#include "winterrisk/outage_model.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace winterrisk::economics {

struct BootstrapParams {
    std::size_t iterations = 10000;
    int horizon_years = 30;
    double discount_rate = 0.05;
    double voll_usd_per_mwh = 9000.0;
    std::uint64_t seed = 20210215;
    unsigned threads = 1;
};

/// Per-iteration discounted losses. Iteration b draws year indices from the
/// counter-based stream (seed, b), so two distributions built with the same
/// parameters over annual sets of equal size are paired draw by draw.
struct LossDistribution {
    std::vector<double> losses_usd;
    std::vector<double> lost_energy_gwh;  // undiscounted sum of the sampled years
    std::size_t sample_years = 0;          // size of the annual set drawn from
    BootstrapParams params;
};

/// loss_b = voll * sum_{i=1..horizon} 1000 * d_{b,i} * (1 + r)^-i, with d in
/// GWh and voll in $/MWh.
LossDistribution bootstrap_losses(std::span<const double> annual_deficits_gwh, const BootstrapParams& params);

/// sum_{i=1..years} (1 + r)^-i
double annuity_factor(double rate, int years);

struct Summary {
    double mean = 0.0;
    double p16 = 0.0;
    double p84 = 0.0;
};

/// Linear-interpolation percentile (q in [0, 100]).
double percentile(std::vector<double> values, double q);
Summary summarize(std::span<const double> values);

/// base_b - winterized_b; requires identical parameters and sample size.
std::vector<double> avoided_loss(const LossDistribution& base, const LossDistribution& winterized);

struct CurvePoint {
    double w_gw = 0.0;
    Summary avoided;
    Summary marginal;  // first difference to the previous grid point; zero at w = 0
};

/// First differences of avoided-loss summaries over a 1 GW grid starting at
/// its first point. Throws InputError if the spacing is not exactly 1 GW.
std::vector<CurvePoint> marginal_curve(std::span<const double> w_grid, std::span<const Summary> avoided);

struct CostInputs {
    double gas_wells = 123000;
    double cost_per_well_usd = 50000;
    double failed_gas_gw = 18;
    double gas_plant_capex_usd_per_gw = 1.12e9;
    double gas_plant_share = 0.10;
    double coal_plant_capex_usd_per_gw = 2.24e9;
    double coal_plant_share = 0.10;
    double wind_plant_capex_usd_per_gw = 1.3e9;
    double wind_plant_share = 0.05;
};

struct TechnologyCost {
    double fuel_infrastructure_usd_per_gw = 0.0;
    double plant_usd_per_gw = 0.0;
    double total_usd_per_gw() const { return fuel_infrastructure_usd_per_gw + plant_usd_per_gw; }
};

struct CostModel {
    double well_total_usd = 0.0;
    TechnologyCost gas;
    TechnologyCost coal;
    TechnologyCost wind;

    double cost_per_gw(outage::Technology t) const;
};

CostModel winterization_costs(const CostInputs& inputs);

/// Number of leading 1 GW steps whose marginal mean avoided loss is at least
/// the cost; 0 when the first step is already unprofitable.
int profitable_capacity(std::span<const double> marginal_means, double cost_per_gw);

}  // namespace winterrisk::economics
