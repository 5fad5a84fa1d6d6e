#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "infomarket/equilibrium.hpp"
#include "infomarket/market.hpp"
#include "infomarket/voi.hpp"

namespace infomarket {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// [solver] section; unset fields fall back to default_solver_config.
struct SolverOverrides {
    std::optional<double> price_lo, price_hi, br_tolerance, fixed_point_tolerance;
    std::optional<std::size_t> grid_points, refine_rounds, max_iterations;

    SolverConfig apply(SolverConfig cfg) const;
    friend bool operator==(const SolverOverrides&, const SolverOverrides&) = default;
};

struct VoiSection {
    std::vector<std::string> states, actions, observations;
    std::vector<double> prior;
    voi::Matrix payoff;
    std::optional<voi::Matrix> channel;
    double cost = 0.0;
    std::vector<voi::Source> sources;  ///< [source] sections, in file order

    friend bool operator==(const VoiSection& a, const VoiSection& b);
};

/// Parsed scenario file. Grammar: `#` comments, `[section]` headers, `key = value` lines.
/// Sections: service (repeatable), market, valuation, solver, voi, source (repeatable).
/// Matrices are written row by row with `;` between rows.
struct ScenarioFile {
    std::vector<Service> services;
    MarketMode mode = Substitute{};
    ValuationDistribution valuation;
    SolverOverrides solver;
    std::optional<VoiSection> voi;

    /// Throws ParseError if the file has no [service] section.
    Scenario scenario() const;
    SolverConfig solver_config() const { return solver.apply(default_solver_config(scenario())); }
    voi::DecisionBase decision_base() const;
    /// Problem with the [voi] channel; throws ParseError if there is none.
    voi::DecisionProblem decision_problem() const;

    friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// `base_dir` resolves relative `samples_file` paths.
ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir = ".");
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Normalized text; parse_scenario(format_scenario(f)) == f.
std::string format_scenario(const ScenarioFile& file);

}  // namespace infomarket
