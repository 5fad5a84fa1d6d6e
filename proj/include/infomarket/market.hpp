#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace infomarket {

/// Raised when an operation is called on a scenario of the wrong market mode.
class ModeError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised when an analytic path cannot handle the requested input.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// One seller of binary event-detection information.
class Service {
public:
    Service(double detection_prob, double false_alarm_prob, double fixed_cost = 0.0);

    double detection_prob() const noexcept { return detection_prob_; }
    double false_alarm_prob() const noexcept { return false_alarm_prob_; }
    double fixed_cost() const noexcept { return fixed_cost_; }

    /// Same sensing quality with a different fixed cost.
    Service with_cost(double fixed_cost) const { return {detection_prob_, false_alarm_prob_, fixed_cost}; }

    friend bool operator==(const Service&, const Service&) = default;

private:
    double detection_prob_;
    double false_alarm_prob_;
    double fixed_cost_;
};

enum class FusionRule { Or, And };

struct Substitute {
    friend bool operator==(const Substitute&, const Substitute&) = default;
};

struct Complementary {
    FusionRule rule = FusionRule::Or;
    friend bool operator==(const Complementary&, const Complementary&) = default;
};

using MarketMode = std::variant<Substitute, Complementary>;

struct UniformValuation {
    double lo = 0.0;
    double hi = 2.0;
    friend bool operator==(const UniformValuation&, const UniformValuation&) = default;
};

struct EmpiricalValuation {
    std::vector<double> samples;
    friend bool operator==(const EmpiricalValuation&, const EmpiricalValuation&) = default;
};

/// Distribution of the per-user weight v on detection.
class ValuationDistribution {
public:
    using Variant = std::variant<UniformValuation, EmpiricalValuation>;

    ValuationDistribution() : ValuationDistribution(UniformValuation{}) {}
    ValuationDistribution(UniformValuation u);
    ValuationDistribution(EmpiricalValuation e);

    static ValuationDistribution uniform(double lo, double hi) { return UniformValuation{lo, hi}; }
    static ValuationDistribution empirical(std::vector<double> samples) { return EmpiricalValuation{std::move(samples)}; }

    bool is_uniform() const noexcept { return std::holds_alternative<UniformValuation>(v_); }
    const UniformValuation& as_uniform() const;
    const Variant& variant() const noexcept { return v_; }

    /// Smallest and largest valuation with positive probability.
    double support_lo() const noexcept;
    double support_hi() const noexcept;

    friend bool operator==(const ValuationDistribution&, const ValuationDistribution&) = default;

private:
    Variant v_;
};

/// Nonnegative, finite prices, one per service.
class PriceVector {
public:
    PriceVector() = default;
    explicit PriceVector(std::vector<double> prices);
    PriceVector(std::initializer_list<double> prices) : PriceVector(std::vector<double>(prices)) {}

    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    double sum() const noexcept;
    std::span<const double> values() const noexcept { return p_; }

    /// Copy with slot i replaced.
    PriceVector with(std::size_t i, double price) const;

    friend bool operator==(const PriceVector&, const PriceVector&) = default;

private:
    std::vector<double> p_;
};

class Scenario {
public:
    Scenario(std::vector<Service> services, MarketMode mode, ValuationDistribution valuation = {});

    const std::vector<Service>& services() const noexcept { return services_; }
    std::size_t size() const noexcept { return services_.size(); }
    const Service& service(std::size_t i) const;
    const MarketMode& mode() const noexcept { return mode_; }
    bool is_substitute() const noexcept { return std::holds_alternative<Substitute>(mode_); }
    /// Throws ModeError for substitute markets.
    FusionRule fusion_rule() const;
    const ValuationDistribution& valuation() const noexcept { return valuation_; }

    /// Throws std::invalid_argument if the price count does not match.
    void check_prices(const PriceVector& prices) const;

    Scenario with_services(std::vector<Service> services) const { return {std::move(services), mode_, valuation_}; }

    friend bool operator==(const Scenario&, const Scenario&) = default;

private:
    std::vector<Service> services_;
    MarketMode mode_;
    ValuationDistribution valuation_;
};

/// Detection probability of the fused report, assuming independent sensing errors.
double fused_detection(std::span<const Service> services, FusionRule rule);
/// False alarm probability of the fused report, assuming independent sensing errors.
double fused_false_alarm(std::span<const Service> services, FusionRule rule);

/// U(s) = v P_d(s) - P_f(s) - p(s) for a user buying only from `service`.
double utility_substitute(double v, const Service& service, double price);

/// U = v P_d(S) - P_f(S) - sum(p) for a user buying from every service of a complementary market.
double utility_complementary(double v, const Scenario& scenario, const PriceVector& prices);

std::string to_string(FusionRule rule);

}  // namespace infomarket
