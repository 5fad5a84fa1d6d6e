#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "infomarket/demand.hpp"
#include "infomarket/market.hpp"

namespace infomarket {

struct SolverConfig {
    double price_lo = 0.0;
    double price_hi = 2.0;
    std::size_t grid_points = 2001;
    std::size_t refine_rounds = 3;
    double br_tolerance = 1e-6;
    double fixed_point_tolerance = 1e-6;
    std::size_t max_iterations = 500;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

/// Defaults with the price box [0, v_max * max_s P_d(s)]; above it no user buys in either mode.
SolverConfig default_solver_config(const Scenario& scenario);

/// F_s = p_s D_s(p) - C_s.
double profit(std::size_t s, const PriceVector& prices, const Scenario& scenario);

struct BestResponse {
    double price;
    double profit;
    bool flat;  ///< demand is zero over the whole box; price is price_lo
};

/// Global grid search over [price_lo, price_hi] followed by local refinement around the incumbent.
/// Slot s of `prices` is ignored.
BestResponse best_response(std::size_t s, const PriceVector& prices, const Scenario& scenario,
                           const SolverConfig& cfg);

struct EquilibriumResult {
    PriceVector prices;
    std::vector<double> profits;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<PriceVector> trace;  ///< initial point followed by the price vector after each sweep
};

/// Gauss-Seidel iterated best response in index order.
EquilibriumResult nash_solve(const Scenario& scenario, const SolverConfig& cfg, const PriceVector& initial);

struct DeviationCheck {
    double incumbent_profit;
    double best_deviation_price;
    double best_deviation_profit;
    double gain;  ///< best_deviation_profit - incumbent_profit
};

struct EpsilonNashReport {
    bool passed;
    double epsilon;
    std::vector<DeviationCheck> services;
};

/// Checks every unilateral deviation on `check_grid` evenly spaced prices over [lo, hi].
EpsilonNashReport verify_epsilon_nash(const PriceVector& prices, const Scenario& scenario, double epsilon,
                                      std::size_t check_grid, double lo, double hi);
/// Same, on the default price box of the scenario.
EpsilonNashReport verify_epsilon_nash(const PriceVector& prices, const Scenario& scenario, double epsilon,
                                      std::size_t check_grid);

/// Best response of service s as the other service's price sweeps `other_prices`. Two-service markets only.
std::vector<std::pair<double, double>> best_response_curve(std::size_t s, std::span<const double> other_prices,
                                                           const Scenario& scenario, const SolverConfig& cfg);

}  // namespace infomarket
