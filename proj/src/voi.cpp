#include "infomarket/voi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace infomarket::voi {

namespace {

void require_distribution(std::span<const double> p, const char* what) {
    double sum = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument(std::string(what) + " has a negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) throw std::invalid_argument(std::string(what) + " does not sum to 1");
}

}  // namespace

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw std::invalid_argument("matrix rows have different lengths");
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("matrix dimensions do not agree");
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k)
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += (*this)(i, k) * rhs(k, j);
    return out;
}

DecisionBase::DecisionBase(std::vector<double> prior, Matrix payoff) : prior_(std::move(prior)), payoff_(std::move(payoff)) {
    if (prior_.empty()) throw std::invalid_argument("decision problem needs at least one state");
    require_distribution(prior_, "prior");
    if (payoff_.rows() != prior_.size()) throw std::invalid_argument("payoff needs one row per state");
    if (payoff_.cols() == 0) throw std::invalid_argument("decision problem needs at least one action");
    for (std::size_t x = 0; x < payoff_.rows(); ++x)
        for (double v : payoff_.row(x))
            if (!std::isfinite(v)) throw std::invalid_argument("payoff entries must be finite");
}

DecisionProblem::DecisionProblem(DecisionBase base, Matrix channel) : base_(std::move(base)), channel_(std::move(channel)) {
    if (channel_.rows() != base_.num_states()) throw std::invalid_argument("channel needs one row per state");
    if (channel_.cols() == 0) throw std::invalid_argument("channel needs at least one observation");
    for (std::size_t x = 0; x < channel_.rows(); ++x) require_distribution(channel_.row(x), "channel row");
}

double DecisionProblem::observation_prob(std::size_t y) const {
    if (y >= num_observations()) throw std::out_of_range("observation index out of range");
    double p = 0.0;
    for (std::size_t x = 0; x < num_states(); ++x) p += prior()[x] * channel_(x, y);
    return p;
}

std::vector<double> posterior(const DecisionProblem& problem, std::size_t y) {
    const double py = problem.observation_prob(y);
    if (!(py > 0.0)) throw ImpossibleObservation("observation " + std::to_string(y) + " has zero probability");
    std::vector<double> post(problem.num_states());
    for (std::size_t x = 0; x < post.size(); ++x) post[x] = problem.prior()[x] * problem.channel()(x, y) / py;
    return post;
}

std::size_t optimal_action(const DecisionBase& problem, std::span<const double> belief) {
    if (belief.size() != problem.num_states()) throw std::invalid_argument("belief needs one entry per state");
    std::size_t best = 0;
    double best_ev = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < problem.num_actions(); ++a) {
        double ev = 0.0;
        for (std::size_t x = 0; x < belief.size(); ++x) ev += problem.payoff()(x, a) * belief[x];
        if (ev > best_ev) {
            best_ev = ev;
            best = a;
        }
    }
    return best;
}

double value_pointwise(const DecisionProblem& problem, std::size_t x, std::size_t y) {
    if (x >= problem.num_states()) throw std::out_of_range("state index out of range");
    const std::size_t a0 = optimal_action(problem, problem.prior());
    const std::size_t ay = optimal_action(problem, posterior(problem, y));
    return problem.payoff()(x, ay) - problem.payoff()(x, a0);
}

VoiReport expected_voi(const DecisionProblem& problem, double cost) {
    const std::size_t X = problem.num_states();
    const std::size_t Y = problem.num_observations();
    VoiReport r{};
    r.prior_action = optimal_action(problem, problem.prior());
    r.pointwise = Matrix(X, Y);
    r.posterior_actions.assign(Y, r.prior_action);

    // Sum over the joint law p(x) p(y|x) directly; avoids dividing by p(y).
    double value = 0.0;
    for (std::size_t y = 0; y < Y; ++y) {
        if (!(problem.observation_prob(y) > 0.0)) continue;
        const std::size_t ay = optimal_action(problem, posterior(problem, y));
        r.posterior_actions[y] = ay;
        for (std::size_t x = 0; x < X; ++x) {
            const double v = problem.payoff()(x, ay) - problem.payoff()(x, r.prior_action);
            r.pointwise(x, y) = v;
            value += problem.prior()[x] * problem.channel()(x, y) * v;
        }
    }
    r.expected_value = value;
    r.gain = value - cost;
    return r;
}

double information_gain(const DecisionProblem& problem, double cost) {
    if (!std::isfinite(cost) || cost < 0.0) throw std::invalid_argument("information cost must be finite and nonnegative");
    return expected_voi(problem, cost).gain;
}

double perfect_information_value(const DecisionBase& problem) {
    double informed = 0.0;
    for (std::size_t x = 0; x < problem.num_states(); ++x) {
        const auto row = problem.payoff().row(x);
        informed += problem.prior()[x] * *std::max_element(row.begin(), row.end());
    }
    const std::size_t a0 = optimal_action(problem, problem.prior());
    double uninformed = 0.0;
    for (std::size_t x = 0; x < problem.num_states(); ++x) uninformed += problem.prior()[x] * problem.payoff()(x, a0);
    return informed - uninformed;
}

SourceSelection select_source(const DecisionBase& base, std::span<const Source> sources) {
    if (sources.empty()) throw std::domain_error("source selection needs at least one source");
    SourceSelection best{0, -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const double g = information_gain(DecisionProblem(base, sources[i].channel), sources[i].cost);
        if (g > best.gain) best = {i, g};
    }
    return best;
}

}  // namespace infomarket::voi
