#include "winterrisk/economics.hpp"

#include "winterrisk/error.hpp"
#include "winterrisk/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

namespace winterrisk::economics {

double annuity_factor(double rate, int years)
{
    if (!(rate > -1.0)) throw InputError("discount rate must be > -1");
    if (years < 0) throw InputError("horizon must be >= 0");
    double s = 0.0;
    for (int i = 1; i <= years; ++i) s += std::pow(1.0 + rate, -i);
    return s;
}

LossDistribution bootstrap_losses(std::span<const double> annual, const BootstrapParams& p)
{
    if (annual.empty()) throw InputError("bootstrap: no annual deficits to sample from");
    if (p.iterations == 0) throw InputError("bootstrap: iterations must be > 0");
    if (p.horizon_years <= 0) throw InputError("bootstrap: horizon must be > 0");
    if (!(p.discount_rate > -1.0)) throw InputError("bootstrap: discount rate must be > -1");
    if (!(p.voll_usd_per_mwh >= 0.0)) throw InputError("bootstrap: value of lost load must be >= 0");
    for (double d : annual)
        if (!(d >= 0.0) || !std::isfinite(d))
            throw InputError(fmt::format("bootstrap: annual deficit {} GWh is not a finite value >= 0", d));

    std::vector<double> discount(static_cast<std::size_t>(p.horizon_years));
    for (int i = 1; i <= p.horizon_years; ++i) discount[static_cast<std::size_t>(i - 1)] = std::pow(1.0 + p.discount_rate, -i);

    LossDistribution out;
    out.params = p;
    out.sample_years = annual.size();
    out.losses_usd.resize(p.iterations);
    out.lost_energy_gwh.resize(p.iterations);

    auto iterate = [&](std::size_t b) {
        rng::Stream s(p.seed, b);
        double loss = 0.0, energy = 0.0;
        for (std::size_t i = 0; i < discount.size(); ++i) {
            const double d = annual[s.index(annual.size())];
            energy += d;
            loss += 1000.0 * d * discount[i];
        }
        out.losses_usd[b] = p.voll_usd_per_mwh * loss;
        out.lost_energy_gwh[b] = energy;
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(p.threads, static_cast<unsigned>(p.iterations)));
    if (threads == 1) {
        for (std::size_t b = 0; b < p.iterations; ++b) iterate(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < p.iterations; b = next++) iterate(b);
            });
    }
    return out;
}

double percentile(std::vector<double> v, double q)
{
    if (v.empty()) throw InputError("percentile of an empty sample");
    if (!(q >= 0.0 && q <= 100.0)) throw InputError("percentile must lie in [0, 100]");
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Summary summarize(std::span<const double> values)
{
    if (values.empty()) throw InputError("summary of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    Summary s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    s.p16 = percentile(v, 16.0);
    s.p84 = percentile(std::move(v), 84.0);
    return s;
}

std::vector<double> avoided_loss(const LossDistribution& base, const LossDistribution& wint)
{
    const auto& a = base.params;
    const auto& b = wint.params;
    if (a.iterations != b.iterations || a.seed != b.seed || a.horizon_years != b.horizon_years ||
        a.discount_rate != b.discount_rate || base.sample_years != wint.sample_years ||
        base.losses_usd.size() != wint.losses_usd.size())
        throw InputError("avoided loss: distributions were not drawn with the same seed, iterations, horizon, "
                         "rate and sample size");
    std::vector<double> out(base.losses_usd.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = base.losses_usd[i] - wint.losses_usd[i];
    return out;
}

std::vector<CurvePoint> marginal_curve(std::span<const double> w_grid, std::span<const Summary> avoided)
{
    if (w_grid.size() != avoided.size())
        throw InputError(fmt::format("marginal curve: {} grid points but {} summaries", w_grid.size(), avoided.size()));
    if (w_grid.empty()) throw InputError("marginal curve: empty grid");
    std::vector<CurvePoint> out;
    for (std::size_t i = 0; i < w_grid.size(); ++i) {
        if (i > 0 && std::abs(w_grid[i] - w_grid[i - 1] - 1.0) > 1e-9)
            throw InputError(fmt::format("marginal curve: grid step {} -> {} is not 1 GW", w_grid[i - 1], w_grid[i]));
        CurvePoint c;
        c.w_gw = w_grid[i];
        c.avoided = avoided[i];
        if (i > 0) {
            c.marginal.mean = avoided[i].mean - avoided[i - 1].mean;
            c.marginal.p16 = avoided[i].p16 - avoided[i - 1].p16;
            c.marginal.p84 = avoided[i].p84 - avoided[i - 1].p84;
        }
        out.push_back(c);
    }
    return out;
}

double CostModel::cost_per_gw(outage::Technology t) const
{
    switch (t) {
    case outage::Technology::Gas: return gas.total_usd_per_gw();
    case outage::Technology::Coal: return coal.total_usd_per_gw();
    case outage::Technology::WindNorth:
    case outage::Technology::WindSouth: return wind.total_usd_per_gw();
    }
    throw InputError("unknown technology");
}

CostModel winterization_costs(const CostInputs& in)
{
    if (!(in.failed_gas_gw > 0.0)) throw InputError("failed gas capacity must be > 0");
    for (double v : {in.gas_wells, in.cost_per_well_usd, in.gas_plant_capex_usd_per_gw, in.gas_plant_share,
                     in.coal_plant_capex_usd_per_gw, in.coal_plant_share, in.wind_plant_capex_usd_per_gw,
                     in.wind_plant_share})
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("cost inputs must be finite and >= 0");
    CostModel m;
    m.well_total_usd = in.gas_wells * in.cost_per_well_usd;
    m.gas.fuel_infrastructure_usd_per_gw = m.well_total_usd / in.failed_gas_gw;
    m.gas.plant_usd_per_gw = in.gas_plant_share * in.gas_plant_capex_usd_per_gw;
    m.coal.plant_usd_per_gw = in.coal_plant_share * in.coal_plant_capex_usd_per_gw;
    m.wind.plant_usd_per_gw = in.wind_plant_share * in.wind_plant_capex_usd_per_gw;
    return m;
}

int profitable_capacity(std::span<const double> marginal_means, double cost_per_gw)
{
    int n = 0;
    for (double m : marginal_means) {
        if (!(m >= cost_per_gw)) break;
        ++n;
    }
    return n;
}

}  // namespace winterrisk::economics
