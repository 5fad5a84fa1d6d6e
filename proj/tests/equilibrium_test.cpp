#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "infomarket/equilibrium.hpp"
#include "test_support.hpp"

using namespace infomarket;

namespace {

// Monopoly demand with uniform weight on [0, vmax]: 1 - (P_f + p) / (vmax P_d), clamped.
double monopoly_profit(double p, double pd, double pf, double vmax) {
    return p * std::clamp(1.0 - (pf + p) / (vmax * pd), 0.0, 1.0);
}

double brute_force_argmax(double pd, double pf, double vmax, double hi, double step) {
    double best_p = 0.0, best_f = 0.0;
    for (double p = 0.0; p <= hi; p += step) {
        const double f = monopoly_profit(p, pd, pf, vmax);
        if (f > best_f) {
            best_f = f;
            best_p = p;
        }
    }
    return best_p;
}

}  // namespace

TEST_CASE("solver config validation and defaults") {
    const auto cfg = default_solver_config(test::reference_substitute());
    CHECK(cfg.price_lo == 0.0);
    CHECK(cfg.price_hi == doctest::Approx(1.8));
    CHECK(cfg.grid_points == 2001);
    CHECK(cfg.refine_rounds == 3);
    CHECK(cfg.br_tolerance == 1e-6);
    CHECK(cfg.fixed_point_tolerance == 1e-6);
    CHECK(cfg.max_iterations == 500);

    SolverConfig bad = cfg;
    bad.grid_points = 2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.price_hi = bad.price_lo;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("profit") {
    CHECK(profit(0, {0.0, 0.4}, test::reference_substitute()) == 0.0);
    CHECK(profit(0, {0.75}, test::monopoly()) == doctest::Approx(0.3515625).epsilon(1e-14));
    const auto sc = test::reference_substitute();
    CHECK(profit(0, {0.51, 0.60}, sc) == doctest::Approx(0.2900625).epsilon(1e-13));
    CHECK(profit(1, {0.51, 0.60}, sc) == doctest::Approx(0.03).epsilon(1e-13));
    CHECK_THROWS_AS(profit(2, {0.51, 0.60}, sc), std::out_of_range);

    const Scenario costly(test::reference_services(0.05, 0.02), Substitute{});
    CHECK(profit(1, {0.51, 0.60}, costly) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("monopoly best responses match the analytic optimum") {
    const auto sc = test::monopoly();
    const auto cfg = default_solver_config(sc);
    const auto br = best_response(0, {0.0}, sc, cfg);
    CHECK(std::abs(br.price - 0.75) <= cfg.br_tolerance);
    CHECK(br.profit == doctest::Approx(0.3515625).epsilon(1e-12));
    CHECK(!br.flat);
    CHECK(std::abs(brute_force_argmax(0.8, 0.1, 2.0, 1.6, 1e-5) - 0.75) <= 1e-5);

    const Scenario textbook({Service(1.0, 0.0)}, Substitute{}, ValuationDistribution::uniform(0, 1));
    const auto cfg2 = default_solver_config(textbook);
    CHECK(std::abs(best_response(0, {0.0}, textbook, cfg2).price - 0.5) <= cfg2.br_tolerance);
    CHECK(std::abs(brute_force_argmax(1.0, 0.0, 1.0, 1.0, 1e-5) - 0.5) <= 1e-5);
}

TEST_CASE("best response with no demand anywhere is flagged flat") {
    const Scenario blind({Service(0.0, 0.1, 0.3)}, Substitute{});
    const auto br = best_response(0, {0.0}, blind, default_solver_config(blind));
    CHECK(br.flat);
    CHECK(br.price == 0.0);
    CHECK(br.profit == doctest::Approx(-0.3));
}

TEST_CASE("substitute best response of service 2 follows the rival price, then saturates") {
    const auto sc = test::reference_substitute();
    const auto cfg = default_solver_config(sc);
    // Interior switching regime: p2 = (1 + 10 p1) / 20.
    for (double p1 : {0.05, 0.1, 0.2}) {
        const auto br = best_response(1, {p1, 0.0}, sc, cfg);
        CHECK(br.price == doctest::Approx((1 + 10 * p1) / 20).epsilon(1e-5));
    }
    // Once service 1 prices itself out (p1 >= 1.5), service 2 is a monopolist at (1.8 - 0.2) / 2.
    for (double p1 : {1.55, 1.65, 1.75, 1.8}) {
        const auto br = best_response(1, {p1, 0.0}, sc, cfg);
        CHECK(std::abs(br.price - 0.8) <= cfg.br_tolerance);
    }
}

TEST_CASE("Gauss-Seidel iteration finds the closed-form substitute equilibrium") {
    // Interior first-order conditions: 22.5 p1 = 0.875 + 10 p2 and 20 p2 = 1 + 10 p1.
    const double p1 = 11.0 / 140.0, p2 = 5.0 / 56.0;
    const auto sc = test::reference_substitute();
    const auto cfg = default_solver_config(sc);
    const auto eq = nash_solve(sc, cfg, {0.9, 0.9});
    REQUIRE(eq.converged);
    CHECK(std::abs(eq.prices[0] - p1) < 1e-5);
    CHECK(std::abs(eq.prices[1] - p2) < 1e-5);
    CHECK(eq.trace.size() == eq.iterations + 1);
    CHECK(eq.trace.front() == PriceVector{0.9, 0.9});
    CHECK(eq.trace.back() == eq.prices);
    CHECK(eq.profits[0] == doctest::Approx(profit(0, eq.prices, sc)));

    // Fixed-point property.
    for (std::size_t s = 0; s < 2; ++s)
        CHECK(std::abs(best_response(s, eq.prices, sc, cfg).price - eq.prices[s]) <=
              cfg.fixed_point_tolerance + cfg.br_tolerance);
}

TEST_CASE("complementary equilibria match the symmetric closed form") {
    // D = 1 - (P_f + p1 + p2) / (2 P_d), so p* = (2 P_d - P_f) / 3 for both services.
    for (auto [rule, pd, pf] : {std::tuple{FusionRule::Or, 0.98, 0.28}, std::tuple{FusionRule::And, 0.72, 0.02}}) {
        const auto sc = test::reference_complementary(rule);
        const auto eq = nash_solve(sc, default_solver_config(sc), {0.2, 1.0});
        REQUIRE(eq.converged);
        const double expect = (2 * pd - pf) / 3;
        CHECK(std::abs(eq.prices[0] - expect) < 1e-5);
        CHECK(std::abs(eq.prices[1] - expect) < 1e-5);
    }
}

TEST_CASE("symmetric game gives symmetric prices and mirrored best-response curves") {
    const Scenario sc({Service(0.85, 0.15), Service(0.85, 0.15)}, Complementary{FusionRule::Or});
    const auto cfg = default_solver_config(sc);
    const auto eq = nash_solve(sc, cfg, {0.4, 0.4});
    REQUIRE(eq.converged);
    CHECK(std::abs(eq.prices[0] - eq.prices[1]) <= cfg.fixed_point_tolerance);

    const std::vector<double> grid{0.0, 0.3, 0.6, 0.9, 1.2};
    const auto c1 = best_response_curve(0, grid, sc, cfg);
    const auto c2 = best_response_curve(1, grid, sc, cfg);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(c1[k].second == doctest::Approx(c2[k].second).epsilon(1e-9));
}

TEST_CASE("iteration cap returns an unconverged result with its trace") {
    const auto sc = test::reference_substitute();
    auto cfg = default_solver_config(sc);
    cfg.max_iterations = 1;
    const auto eq = nash_solve(sc, cfg, {1.5, 1.5});
    CHECK(!eq.converged);
    CHECK(eq.iterations == 1);
    CHECK(eq.trace.size() == 2);
    CHECK_THROWS_AS(nash_solve(sc, cfg, {2.5, 0.1}), std::invalid_argument);
}

TEST_CASE("epsilon-Nash certificate") {
    const auto sc = test::reference_substitute();
    const auto eq = nash_solve(sc, default_solver_config(sc), {0.3, 0.3});
    const auto pass = verify_epsilon_nash(eq.prices, sc, 1e-4, 10000);
    CHECK(pass.passed);
    REQUIRE(pass.services.size() == 2);
    for (const auto& c : pass.services) CHECK(c.gain <= 1e-4);

    const auto fail = verify_epsilon_nash({0.0, 0.0}, sc, 1e-4, 10000);
    CHECK(!fail.passed);
    CHECK(fail.services[0].gain > 0.0);
    CHECK(fail.services[1].gain > 0.0);

    CHECK(verify_epsilon_nash({0.75}, test::monopoly(), 1e-6, 10000).passed);
}

TEST_CASE("best-response curves need two services") {
    const auto cfg = default_solver_config(test::monopoly());
    const std::vector<double> grid{0.1};
    CHECK_THROWS_AS(best_response_curve(0, grid, test::monopoly(), cfg), UnsupportedError);
}

TEST_CASE("fixed costs shift profits but not prices") {
    const auto base = test::reference_substitute();
    const Scenario costly(test::reference_services(0.05, 0.05), Substitute{});
    const auto a = nash_solve(base, default_solver_config(base), {0.5, 0.5});
    const auto b = nash_solve(costly, default_solver_config(costly), {0.5, 0.5});
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(std::abs(a.prices[s] - b.prices[s]) <= 1e-5);
        CHECK(std::abs((b.profits[s] - a.profits[s]) + 0.05) <= 1e-12);
    }
}

namespace {

// Crossings of the two best-response curves: zeros of g(q) = BR2(BR1(q)) - q on a grid.
std::vector<double> curve_crossings(const Scenario& sc, const SolverConfig& cfg, std::size_t n) {
    std::vector<double> grid;
    for (std::size_t k = 0; k < n; ++k) grid.push_back(cfg.price_lo + (cfg.price_hi - cfg.price_lo) * k / (n - 1));
    const auto br1 = best_response_curve(0, grid, sc, cfg);
    std::vector<double> g;
    for (const auto& [q, p1] : br1) g.push_back(best_response(1, {p1, 0.0}, sc, cfg).price - q);
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < n; ++k)
        if ((g[k] > 0) != (g[k + 1] > 0)) out.push_back(grid[k] - g[k] * (grid[k + 1] - grid[k]) / (g[k + 1] - g[k]));
    return out;
}

}  // namespace

TEST_CASE("best-response curves cross once, higher for complementary services") {
    const auto sub = test::reference_substitute();
    const auto cfg = default_solver_config(sub);
    const auto cross_sub = curve_crossings(sub, cfg, 181);
    REQUIRE(cross_sub.size() == 1);
    CHECK(cross_sub[0] == doctest::Approx(5.0 / 56.0).epsilon(1e-3));

    for (auto rule : {FusionRule::Or, FusionRule::And}) {
        const auto comp = test::reference_complementary(rule);
        const auto cross = curve_crossings(comp, default_solver_config(comp), 181);
        REQUIRE(cross.size() == 1);
        // p2 at the crossing, and p1 = BR1(p2) there.
        CHECK(cross[0] > cross_sub[0]);
        const double p1 = best_response(0, {0.0, cross[0]}, comp, cfg).price;
        const double p1_sub = best_response(0, {0.0, cross_sub[0]}, sub, cfg).price;
        CHECK(p1 > p1_sub);
    }
}
