#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace infomarket::voi {

/// Observation with zero probability under the prior and channel.
class ImpossibleObservation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    /// Throws std::invalid_argument on ragged input.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    Matrix operator*(const Matrix& rhs) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline constexpr double kProbabilityTolerance = 1e-12;

/// Prior and payoff table without an information source.
class DecisionBase {
public:
    DecisionBase(std::vector<double> prior, Matrix payoff);

    std::size_t num_states() const noexcept { return prior_.size(); }
    std::size_t num_actions() const noexcept { return payoff_.cols(); }
    const std::vector<double>& prior() const noexcept { return prior_; }
    /// states x actions
    const Matrix& payoff() const noexcept { return payoff_; }

private:
    std::vector<double> prior_;
    Matrix payoff_;
};

/// A finite Bayesian decision problem with an observation channel p(y|x) (states x observations).
class DecisionProblem {
public:
    DecisionProblem(DecisionBase base, Matrix channel);
    DecisionProblem(std::vector<double> prior, Matrix payoff, Matrix channel)
        : DecisionProblem(DecisionBase(std::move(prior), std::move(payoff)), std::move(channel)) {}

    const DecisionBase& base() const noexcept { return base_; }
    std::size_t num_states() const noexcept { return base_.num_states(); }
    std::size_t num_actions() const noexcept { return base_.num_actions(); }
    std::size_t num_observations() const noexcept { return channel_.cols(); }
    const std::vector<double>& prior() const noexcept { return base_.prior(); }
    const Matrix& payoff() const noexcept { return base_.payoff(); }
    const Matrix& channel() const noexcept { return channel_; }

    /// Marginal probability of observation y.
    double observation_prob(std::size_t y) const;

private:
    DecisionBase base_;
    Matrix channel_;
};

struct VoiReport {
    std::size_t prior_action;
    std::vector<std::size_t> posterior_actions;  ///< indexed by observation; prior_action for impossible ones
    Matrix pointwise;                            ///< v(x, y), states x observations; 0 for impossible y
    double expected_value;
    double gain;
};

std::vector<double> posterior(const DecisionProblem& problem, std::size_t y);

/// argmax_a sum_x payoff(x, a) belief(x), lowest index on ties.
std::size_t optimal_action(const DecisionBase& problem, std::span<const double> belief);
inline std::size_t optimal_action(const DecisionProblem& problem, std::span<const double> belief) {
    return optimal_action(problem.base(), belief);
}

/// v(x, y) = payoff(x, a_y) - payoff(x, a_0).
double value_pointwise(const DecisionProblem& problem, std::size_t x, std::size_t y);

VoiReport expected_voi(const DecisionProblem& problem, double cost = 0.0);

double information_gain(const DecisionProblem& problem, double cost);

/// E_x[max_a payoff] - max_a E_x[payoff]: the value of observing the state itself.
double perfect_information_value(const DecisionBase& problem);

struct Source {
    Matrix channel;
    double cost = 0.0;
};

struct SourceSelection {
    std::size_t index;
    double gain;
};

/// The source with the highest information gain, lowest index on ties.
SourceSelection select_source(const DecisionBase& base, std::span<const Source> sources);

}  // namespace infomarket::voi
