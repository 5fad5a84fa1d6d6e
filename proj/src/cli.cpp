#include "infomarket/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include "infomarket/demand.hpp"
#include "infomarket/equilibrium.hpp"
#include "infomarket/scenario_file.hpp"
#include "infomarket/voi.hpp"

namespace infomarket::cli {

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

struct Options {
    std::string scenario;
    std::uint64_t seed = 42;
    std::string out;
    std::size_t steps = 201;
    std::optional<double> epsilon;
    std::size_t samples = 0;
    std::size_t service = 1;
    std::vector<double> prices;
    std::optional<double> lo, hi;
    std::vector<double> initial;
    std::size_t check_grid = 10000;
};

/// Writes to --out when given, otherwise to the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
        }
        os_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

void write_row(std::ostream& os, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
}

std::vector<double> grid(double lo, double hi, std::size_t steps) {
    if (steps < 2) throw CLI::ValidationError("--steps", "must be at least 2");
    if (hi < lo) throw CLI::ValidationError("--hi", "must not be below --lo");
    std::vector<double> xs(steps);
    for (std::size_t k = 0; k < steps; ++k)
        xs[k] = k + 1 == steps ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
    return xs;
}

std::size_t service_index(const Options& o, const Scenario& sc) {
    if (o.service < 1 || o.service > sc.size())
        throw CLI::ValidationError("--service", "must be between 1 and " + std::to_string(sc.size()));
    return o.service - 1;
}

PriceVector fixed_prices(const Options& o, const Scenario& sc) {
    if (o.prices.empty()) return PriceVector(std::vector<double>(sc.size(), 0.0));
    if (o.prices.size() != sc.size())
        throw CLI::ValidationError("--prices", "needs " + std::to_string(sc.size()) + " comma-separated values");
    return PriceVector(o.prices);
}

std::vector<double> sweep_demand(const Options& o, const Scenario& sc, const PriceVector& p) {
    return o.samples > 0 ? demand_monte_carlo(sc, p, o.samples, o.seed).demand : demand(sc, p).demand;
}

int cmd_sweep(const Options& o, bool profits, std::ostream& out) {
    const auto file = load_scenario(o.scenario);
    const auto sc = file.scenario();
    const auto cfg = file.solver_config();
    const auto s = service_index(o, sc);
    const auto base = fixed_prices(o, sc);
    const auto xs = grid(o.lo.value_or(cfg.price_lo), o.hi.value_or(cfg.price_hi), o.steps);

    Sink sink(o.out, out);
    auto& os = sink.stream();
    os << "swept_price";
    for (std::size_t i = 1; i <= sc.size(); ++i) os << (profits ? ",profit_" : ",demand_") << i;
    os << '\n';
    for (double x : xs) {
        const auto p = base.with(s, x);
        auto d = sweep_demand(o, sc, p);
        std::vector<double> row{x};
        for (std::size_t i = 0; i < d.size(); ++i)
            row.push_back(profits ? p[i] * d[i] - sc.service(i).fixed_cost() : d[i]);
        write_row(os, row);
    }
    return kOk;
}

int cmd_br_curve(const Options& o, std::ostream& out) {
    const auto file = load_scenario(o.scenario);
    const auto sc = file.scenario();
    const auto cfg = file.solver_config();
    const auto s = service_index(o, sc);
    const auto xs = grid(o.lo.value_or(cfg.price_lo), o.hi.value_or(cfg.price_hi), o.steps);
    const auto curve = best_response_curve(s, xs, sc, cfg);

    Sink sink(o.out, out);
    auto& os = sink.stream();
    os << "opponent_price,best_response\n";
    for (const auto& [q, br] : curve) write_row(os, {q, br});
    return kOk;
}

int cmd_nash(const Options& o, std::ostream& out) {
    const auto file = load_scenario(o.scenario);
    const auto sc = file.scenario();
    const auto cfg = file.solver_config();
    const double epsilon = o.epsilon.value_or(1e-4);

    PriceVector initial(std::vector<double>(sc.size(), 0.5 * (cfg.price_lo + cfg.price_hi)));
    if (!o.initial.empty()) {
        if (o.initial.size() != sc.size())
            throw CLI::ValidationError("--initial", "needs " + std::to_string(sc.size()) + " comma-separated values");
        initial = PriceVector(o.initial);
    }

    const auto eq = nash_solve(sc, cfg, initial);
    const auto cert = verify_epsilon_nash(eq.prices, sc, epsilon, o.check_grid, cfg.price_lo, cfg.price_hi);

    out << "mode," << (sc.is_substitute() ? "substitute" : "complementary-" + to_string(sc.fusion_rule())) << '\n'
        << "converged," << (eq.converged ? "yes" : "no") << '\n'
        << "iterations," << eq.iterations << '\n'
        << "certified," << (cert.passed ? "yes" : "no") << '\n'
        << "epsilon," << format_number(epsilon) << '\n'
        << "service,price,profit,demand,max_deviation_gain\n";
    const auto d = demand(sc, eq.prices).demand;
    for (std::size_t s = 0; s < sc.size(); ++s) {
        out << s + 1 << ',';
        write_row(out, {eq.prices[s], eq.profits[s], d[s], cert.services[s].gain});
    }

    Sink sink(o.out, out);
    auto& os = sink.stream();
    if (o.out.empty()) os << '\n';
    os << "iteration";
    for (std::size_t i = 1; i <= sc.size(); ++i) os << ",price_" << i;
    os << '\n';
    for (std::size_t k = 0; k < eq.trace.size(); ++k) {
        os << k << ',';
        const auto v = eq.trace[k].values();
        write_row(os, {v.begin(), v.end()});
    }

    if (!eq.converged) return kNotConverged;
    return cert.passed ? kOk : kNotCertified;
}

std::string label(const std::vector<std::string>& names, std::size_t i) {
    return i < names.size() ? names[i] : std::to_string(i + 1);
}

int cmd_voi(const Options& o, std::ostream& out) {
    const auto file = load_scenario(o.scenario);
    if (!file.voi) throw ParseError(0, "scenario has no [voi] section");
    const auto& v = *file.voi;

    Sink sink(o.out, out);
    auto& os = sink.stream();
    const auto base = file.decision_base();
    os << "prior_action," << label(v.actions, voi::optimal_action(base, base.prior())) << '\n';
    if (v.channel) {
        const auto report = voi::expected_voi(file.decision_problem(), v.cost);
        os << "observation,action\n";
        for (std::size_t y = 0; y < report.posterior_actions.size(); ++y)
            os << label(v.observations, y) << ',' << label(v.actions, report.posterior_actions[y]) << '\n';
        os << "expected_value," << format_number(report.expected_value) << '\n'
           << "cost," << format_number(v.cost) << '\n'
           << "gain," << format_number(report.gain) << '\n';
    }
    if (!v.sources.empty()) {
        os << "source,expected_value,cost,gain\n";
        for (std::size_t i = 0; i < v.sources.size(); ++i) {
            const auto r = voi::expected_voi(voi::DecisionProblem(base, v.sources[i].channel), v.sources[i].cost);
            os << i + 1 << ',';
            write_row(os, {r.expected_value, v.sources[i].cost, r.gain});
        }
        const auto pick = voi::select_source(base, v.sources);
        os << "selected_source," << pick.index + 1 << '\n' << "selected_gain," << format_number(pick.gain) << '\n';
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Price competition among sensing-information services, and value of information"};
    app.name("infomarket");
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--scenario", o.scenario, "Scenario file")->required();
        sub->add_option("--seed", o.seed, "Seed for Monte Carlo demand")->capture_default_str();
        sub->add_option("--out", o.out, "Write CSV here instead of standard output");
    };
    auto sweep = [&](CLI::App* sub) {
        common(sub);
        sub->add_option("--service", o.service, "Service whose price is swept (1-based)")->capture_default_str();
        sub->add_option("--prices", o.prices, "Prices of all services, comma-separated")->delimiter(',');
        sub->add_option("--lo", o.lo, "Sweep start (default: solver price_lo)");
        sub->add_option("--hi", o.hi, "Sweep end (default: solver price_hi)");
        sub->add_option("--steps", o.steps, "Grid points including both ends")->capture_default_str();
        sub->add_option("--samples", o.samples, "Monte Carlo samples per point (0 = exact demand)")
            ->capture_default_str();
    };

    auto* demand_cmd = app.add_subcommand("demand-sweep", "Demand of every service as one price is swept");
    sweep(demand_cmd);
    auto* profit_cmd = app.add_subcommand("profit-sweep", "Profit of every service as one price is swept");
    sweep(profit_cmd);

    auto* br_cmd = app.add_subcommand("br-curve", "Best response of one service against the other's price");
    common(br_cmd);
    br_cmd->add_option("--service", o.service, "Responding service (1-based)")->capture_default_str();
    br_cmd->add_option("--lo", o.lo, "Opponent price sweep start");
    br_cmd->add_option("--hi", o.hi, "Opponent price sweep end");
    br_cmd->add_option("--steps", o.steps, "Grid points including both ends")->capture_default_str();

    auto* nash_cmd = app.add_subcommand("nash", "Solve for equilibrium prices and certify them");
    common(nash_cmd);
    nash_cmd->add_option("--initial", o.initial, "Initial prices, comma-separated")->delimiter(',');
    nash_cmd->add_option("--epsilon", o.epsilon, "Certification tolerance (default 1e-4)");
    nash_cmd->add_option("--check-grid", o.check_grid, "Deviation grid size")->capture_default_str();

    auto* voi_cmd = app.add_subcommand("voi", "Value-of-information report for the [voi] section");
    common(voi_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (*demand_cmd) return cmd_sweep(o, false, out);
        if (*profit_cmd) return cmd_sweep(o, true, out);
        if (*br_cmd) return cmd_br_curve(o, out);
        if (*nash_cmd) return cmd_nash(o, out);
        return cmd_voi(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
}

}  // namespace infomarket::cli
