#include "infomarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace infomarket {

void SolverConfig::validate() const {
    if (!std::isfinite(price_lo) || !std::isfinite(price_hi) || price_lo < 0.0 || !(price_lo < price_hi))
        throw std::invalid_argument("solver needs finite 0 <= price_lo < price_hi");
    if (grid_points < 3) throw std::invalid_argument("solver needs grid_points >= 3");
    if (!(br_tolerance > 0.0) || !(fixed_point_tolerance > 0.0))
        throw std::invalid_argument("solver tolerances must be positive");
    if (max_iterations == 0) throw std::invalid_argument("solver needs max_iterations >= 1");
}

SolverConfig default_solver_config(const Scenario& scenario) {
    SolverConfig cfg;
    double pd = 0.0;
    for (const auto& s : scenario.services()) pd = std::max(pd, s.detection_prob());
    const double hi = scenario.valuation().support_hi() * pd;
    // A zero box (no detection or no valuation) still needs a valid interval.
    cfg.price_hi = hi > 0.0 ? hi : 1.0;
    return cfg;
}

double profit(std::size_t s, const PriceVector& prices, const Scenario& scenario) {
    const Service& svc = scenario.service(s);
    scenario.check_prices(prices);
    return prices[s] * demand(scenario, prices).demand[s] - svc.fixed_cost();
}

BestResponse best_response(std::size_t s, const PriceVector& prices, const Scenario& scenario,
                           const SolverConfig& cfg) {
    cfg.validate();
    const double cost = scenario.service(s).fixed_cost();
    scenario.check_prices(prices);

    double best_p = cfg.price_lo;
    double best_f = -cost;
    bool any_demand = false;

    auto scan = [&](double lo, double hi) {
        const auto n = cfg.grid_points;
        for (std::size_t k = 0; k < n; ++k) {
            const double p = k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
            const double d = demand(scenario, prices.with(s, p)).demand[s];
            if (d > 0.0) any_demand = true;
            const double f = p * d - cost;
            if (f > best_f) {
                best_f = f;
                best_p = p;
            }
        }
        return (hi - lo) / static_cast<double>(n - 1);
    };

    double step = scan(cfg.price_lo, cfg.price_hi);
    if (!any_demand) return {cfg.price_lo, -cost, true};

    for (std::size_t round = 0; round < cfg.refine_rounds || step > cfg.br_tolerance; ++round) {
        if (round >= cfg.refine_rounds + 64) break;
        step = scan(std::max(cfg.price_lo, best_p - step), std::min(cfg.price_hi, best_p + step));
    }
    return {best_p, best_f, false};
}

EquilibriumResult nash_solve(const Scenario& scenario, const SolverConfig& cfg, const PriceVector& initial) {
    cfg.validate();
    scenario.check_prices(initial);
    for (double p : initial.values())
        if (p < cfg.price_lo || p > cfg.price_hi) throw std::invalid_argument("initial prices must lie in the price box");

    EquilibriumResult r;
    r.prices = initial;
    r.trace.push_back(initial);
    while (r.iterations < cfg.max_iterations) {
        const PriceVector before = r.prices;
        for (std::size_t s = 0; s < scenario.size(); ++s)
            r.prices = r.prices.with(s, best_response(s, r.prices, scenario, cfg).price);
        ++r.iterations;
        r.trace.push_back(r.prices);

        double change = 0.0;
        for (std::size_t s = 0; s < scenario.size(); ++s) change = std::max(change, std::abs(r.prices[s] - before[s]));
        if (change <= cfg.fixed_point_tolerance) {
            r.converged = true;
            break;
        }
    }
    for (std::size_t s = 0; s < scenario.size(); ++s) r.profits.push_back(profit(s, r.prices, scenario));
    return r;
}

EpsilonNashReport verify_epsilon_nash(const PriceVector& prices, const Scenario& scenario, double epsilon,
                                      std::size_t check_grid, double lo, double hi) {
    if (check_grid < 2) throw std::invalid_argument("deviation grid needs at least two points");
    scenario.check_prices(prices);
    EpsilonNashReport report{true, epsilon, {}};
    for (std::size_t s = 0; s < scenario.size(); ++s) {
        DeviationCheck c{};
        c.incumbent_profit = profit(s, prices, scenario);
        c.best_deviation_profit = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < check_grid; ++k) {
            const double p = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(check_grid - 1);
            const double f = profit(s, prices.with(s, p), scenario);
            if (f > c.best_deviation_profit) {
                c.best_deviation_profit = f;
                c.best_deviation_price = p;
            }
        }
        c.gain = c.best_deviation_profit - c.incumbent_profit;
        if (c.gain > epsilon) report.passed = false;
        report.services.push_back(c);
    }
    return report;
}

EpsilonNashReport verify_epsilon_nash(const PriceVector& prices, const Scenario& scenario, double epsilon,
                                      std::size_t check_grid) {
    const auto cfg = default_solver_config(scenario);
    return verify_epsilon_nash(prices, scenario, epsilon, check_grid, cfg.price_lo, cfg.price_hi);
}

std::vector<std::pair<double, double>> best_response_curve(std::size_t s, std::span<const double> other_prices,
                                                           const Scenario& scenario, const SolverConfig& cfg) {
    if (scenario.size() != 2) throw UnsupportedError("best-response curves need exactly two services");
    if (s > 1) throw std::out_of_range("service index out of range");
    const std::size_t other = 1 - s;
    std::vector<std::pair<double, double>> curve;
    curve.reserve(other_prices.size());
    for (double q : other_prices) {
        const PriceVector prices = PriceVector({0.0, 0.0}).with(other, q);
        curve.emplace_back(q, best_response(s, prices, scenario, cfg).price);
    }
    return curve;
}

}  // namespace infomarket
