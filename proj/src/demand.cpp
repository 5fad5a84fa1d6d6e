#include "infomarket/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "infomarket/rng.hpp"

namespace infomarket {

namespace {

void require_substitute(const Scenario& scenario) {
    if (!scenario.is_substitute()) throw ModeError("substitute demand called on a complementary market");
}

void require_complementary(const Scenario& scenario) {
    if (scenario.is_substitute()) throw ModeError("complementary demand called on a substitute market");
}

// Candidate breakpoints: participation thresholds and pairwise indifference points.
std::vector<double> breakpoints(const Scenario& scenario, const PriceVector& prices, double lo, double hi) {
    const auto& svc = scenario.services();
    std::vector<double> pts{lo, hi};
    auto keep = [&](double x) {
        if (std::isfinite(x) && x > lo && x < hi) pts.push_back(x);
    };
    for (std::size_t i = 0; i < svc.size(); ++i) {
        if (svc[i].detection_prob() > 0.0) keep((svc[i].false_alarm_prob() + prices[i]) / svc[i].detection_prob());
        for (std::size_t j = i + 1; j < svc.size(); ++j) {
            const double dpd = svc[j].detection_prob() - svc[i].detection_prob();
            if (dpd == 0.0) continue;
            const double dcost = (svc[j].false_alarm_prob() + prices[j]) - (svc[i].false_alarm_prob() + prices[i]);
            keep(dcost / dpd);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

DemandResult from_segments(std::vector<Segment> segments, std::size_t n_services, double lo, double hi) {
    DemandResult r;
    r.demand.assign(n_services, 0.0);
    const double width = hi - lo;
    for (const auto& seg : segments) {
        const double mass = (seg.hi - seg.lo) / width;
        if (seg.choice.kind == Choice::Kind::Service) {
            r.demand[seg.choice.index] += mass;
        } else if (seg.choice.kind == Choice::Kind::AllServices) {
            for (auto& d : r.demand) d += mass;
        }
    }
    for (auto& d : r.demand) d = std::clamp(d, 0.0, 1.0);
    r.segments = std::move(segments);
    return r;
}

bool buys_complementary(double v, double pd, double pf, double total_price) { return v * pd - pf - total_price > 0.0; }

template <typename NextValuation>
DemandResult sampled(const Scenario& scenario, const PriceVector& prices, std::size_t n, NextValuation next) {
    scenario.check_prices(prices);
    const std::size_t S = scenario.size();
    std::vector<std::size_t> counts(S, 0);
    if (scenario.is_substitute()) {
        for (std::size_t k = 0; k < n; ++k) {
            const Choice c = substitute_choice(next(k), scenario, prices);
            if (c.kind == Choice::Kind::Service) ++counts[c.index];
        }
    } else {
        const FusionRule rule = scenario.fusion_rule();
        const double pd = fused_detection(scenario.services(), rule);
        const double pf = fused_false_alarm(scenario.services(), rule);
        const double total = prices.sum();
        std::size_t buyers = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (buys_complementary(next(k), pd, pf, total)) ++buyers;
        std::fill(counts.begin(), counts.end(), buyers);
    }
    DemandResult r;
    r.demand.reserve(S);
    for (auto c : counts) r.demand.push_back(static_cast<double>(c) / static_cast<double>(n));
    return r;
}

}  // namespace

Choice substitute_choice(double v, const Scenario& scenario, const PriceVector& prices) {
    const auto& svc = scenario.services();
    std::size_t best = 0;
    double best_u = utility_substitute(v, svc[0], prices[0]);
    for (std::size_t i = 1; i < svc.size(); ++i) {
        const double u = utility_substitute(v, svc[i], prices[i]);
        if (u > best_u) {
            best_u = u;
            best = i;
        }
    }
    return best_u > 0.0 ? Choice::service(best) : Choice::none();
}

std::vector<Segment> segment_substitute(const Scenario& scenario, const PriceVector& prices) {
    require_substitute(scenario);
    scenario.check_prices(prices);
    const auto& u = scenario.valuation().as_uniform();

    const auto pts = breakpoints(scenario, prices, u.lo, u.hi);
    std::vector<Segment> segments;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const Choice c = substitute_choice(0.5 * (pts[k] + pts[k + 1]), scenario, prices);
        if (!segments.empty() && segments.back().choice == c)
            segments.back().hi = pts[k + 1];
        else
            segments.push_back({pts[k], pts[k + 1], c});
    }
    return segments;
}

DemandResult demand_substitute(const Scenario& scenario, const PriceVector& prices) {
    auto segments = segment_substitute(scenario, prices);
    const auto& u = scenario.valuation().as_uniform();
    return from_segments(std::move(segments), scenario.size(), u.lo, u.hi);
}

double complementary_threshold(const Scenario& scenario, const PriceVector& prices) {
    const FusionRule rule = scenario.fusion_rule();
    scenario.check_prices(prices);
    const double pd = fused_detection(scenario.services(), rule);
    if (pd <= 0.0) return std::numeric_limits<double>::infinity();
    return (fused_false_alarm(scenario.services(), rule) + prices.sum()) / pd;
}

DemandResult demand_complementary(const Scenario& scenario, const PriceVector& prices) {
    require_complementary(scenario);
    const double th = complementary_threshold(scenario, prices);
    const auto& u = scenario.valuation().as_uniform();
    std::vector<Segment> segments;
    if (th <= u.lo) {
        segments.push_back({u.lo, u.hi, Choice::all()});
    } else if (th >= u.hi) {
        segments.push_back({u.lo, u.hi, Choice::none()});
    } else {
        segments.push_back({u.lo, th, Choice::none()});
        segments.push_back({th, u.hi, Choice::all()});
    }
    return from_segments(std::move(segments), scenario.size(), u.lo, u.hi);
}

DemandResult demand_monte_carlo(const Scenario& scenario, const PriceVector& prices, std::size_t n_samples,
                                std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("Monte Carlo demand needs at least one sample");
    Rng rng(seed);
    return std::visit(
        [&](const auto& dist) {
            using T = std::decay_t<decltype(dist)>;
            if constexpr (std::is_same_v<T, UniformValuation>) {
                return sampled(scenario, prices, n_samples, [&](std::size_t) { return rng.uniform(dist.lo, dist.hi); });
            } else {
                return sampled(scenario, prices, n_samples,
                               [&](std::size_t) { return dist.samples[rng.index(dist.samples.size())]; });
            }
        },
        scenario.valuation().variant());
}

DemandResult demand_empirical(const Scenario& scenario, const PriceVector& prices) {
    const auto* e = std::get_if<EmpiricalValuation>(&scenario.valuation().variant());
    if (e == nullptr) throw UnsupportedError("empirical demand needs an empirical valuation");
    return sampled(scenario, prices, e->samples.size(), [&](std::size_t k) { return e->samples[k]; });
}

DemandResult demand(const Scenario& scenario, const PriceVector& prices) {
    if (!scenario.valuation().is_uniform()) return demand_empirical(scenario, prices);
    return scenario.is_substitute() ? demand_substitute(scenario, prices) : demand_complementary(scenario, prices);
}

}  // namespace infomarket
