#include "infomarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace infomarket {

namespace {

void require_probability(double x, const char* what) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
        throw std::invalid_argument(std::string(what) + " must be a probability in [0, 1]");
}

template <typename Get>
double fuse(std::span<const Service> services, FusionRule rule, Get get) {
    if (services.empty()) throw std::domain_error("fusion needs at least one service");
    double prod = 1.0;
    if (rule == FusionRule::Or) {
        for (const auto& s : services) prod *= 1.0 - get(s);
        return 1.0 - prod;
    }
    for (const auto& s : services) prod *= get(s);
    return prod;
}

}  // namespace

Service::Service(double detection_prob, double false_alarm_prob, double fixed_cost)
    : detection_prob_(detection_prob), false_alarm_prob_(false_alarm_prob), fixed_cost_(fixed_cost) {
    require_probability(detection_prob, "detection probability");
    require_probability(false_alarm_prob, "false alarm probability");
    if (!std::isfinite(fixed_cost) || fixed_cost < 0.0)
        throw std::invalid_argument("fixed cost must be finite and nonnegative");
}

ValuationDistribution::ValuationDistribution(UniformValuation u) : v_(u) {
    if (!std::isfinite(u.lo) || !std::isfinite(u.hi) || u.lo < 0.0 || !(u.lo < u.hi))
        throw std::invalid_argument("uniform valuation needs finite 0 <= lo < hi");
}

ValuationDistribution::ValuationDistribution(EmpiricalValuation e) : v_(std::move(e)) {
    const auto& s = std::get<EmpiricalValuation>(v_).samples;
    if (s.empty()) throw std::invalid_argument("empirical valuation needs at least one sample");
    for (double x : s)
        if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("valuation samples must be finite and nonnegative");
}

const UniformValuation& ValuationDistribution::as_uniform() const {
    if (const auto* u = std::get_if<UniformValuation>(&v_)) return *u;
    throw UnsupportedError("analytic demand needs a uniform valuation; use Monte Carlo or the empirical path");
}

double ValuationDistribution::support_lo() const noexcept {
    if (const auto* u = std::get_if<UniformValuation>(&v_)) return u->lo;
    const auto& s = std::get<EmpiricalValuation>(v_).samples;
    return *std::min_element(s.begin(), s.end());
}

double ValuationDistribution::support_hi() const noexcept {
    if (const auto* u = std::get_if<UniformValuation>(&v_)) return u->hi;
    const auto& s = std::get<EmpiricalValuation>(v_).samples;
    return *std::max_element(s.begin(), s.end());
}

PriceVector::PriceVector(std::vector<double> prices) : p_(std::move(prices)) {
    for (double x : p_)
        if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("prices must be finite and nonnegative");
}

double PriceVector::sum() const noexcept { return std::accumulate(p_.begin(), p_.end(), 0.0); }

PriceVector PriceVector::with(std::size_t i, double price) const {
    auto copy = p_;
    copy.at(i) = price;
    return PriceVector(std::move(copy));
}

Scenario::Scenario(std::vector<Service> services, MarketMode mode, ValuationDistribution valuation)
    : services_(std::move(services)), mode_(mode), valuation_(std::move(valuation)) {
    if (services_.empty()) throw std::invalid_argument("a scenario needs at least one service");
}

const Service& Scenario::service(std::size_t i) const {
    if (i >= services_.size()) throw std::out_of_range("service index out of range");
    return services_[i];
}

FusionRule Scenario::fusion_rule() const {
    if (const auto* c = std::get_if<Complementary>(&mode_)) return c->rule;
    throw ModeError("substitute market has no fusion rule");
}

void Scenario::check_prices(const PriceVector& prices) const {
    if (prices.size() != services_.size())
        throw std::invalid_argument("price vector length " + std::to_string(prices.size()) + " does not match " +
                                    std::to_string(services_.size()) + " services");
}

double fused_detection(std::span<const Service> services, FusionRule rule) {
    return fuse(services, rule, [](const Service& s) { return s.detection_prob(); });
}

double fused_false_alarm(std::span<const Service> services, FusionRule rule) {
    return fuse(services, rule, [](const Service& s) { return s.false_alarm_prob(); });
}

double utility_substitute(double v, const Service& service, double price) {
    return v * service.detection_prob() - service.false_alarm_prob() - price;
}

double utility_complementary(double v, const Scenario& scenario, const PriceVector& prices) {
    const FusionRule rule = scenario.fusion_rule();
    scenario.check_prices(prices);
    return v * fused_detection(scenario.services(), rule) - fused_false_alarm(scenario.services(), rule) - prices.sum();
}

std::string to_string(FusionRule rule) { return rule == FusionRule::Or ? "or" : "and"; }

}  // namespace infomarket
