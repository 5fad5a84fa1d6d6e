#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "infomarket/market.hpp"

namespace infomarket {

/// What a user with valuation in a segment buys.
struct Choice {
    enum class Kind { None, Service, AllServices };
    Kind kind = Kind::None;
    std::size_t index = 0;  ///< only meaningful for Kind::Service

    static Choice none() { return {}; }
    static Choice service(std::size_t i) { return {Kind::Service, i}; }
    static Choice all() { return {Kind::AllServices, 0}; }

    friend bool operator==(const Choice&, const Choice&) = default;
};

struct Segment {
    double lo;
    double hi;
    Choice choice;
};

/// Population fraction buying from each service, plus the valuation segments behind it
/// (empty for sampled paths).
struct DemandResult {
    std::vector<double> demand;
    std::vector<Segment> segments;
};

/// Per-user choice in a substitute market: highest utility wins if strictly positive,
/// ties go to the lowest index.
Choice substitute_choice(double v, const Scenario& scenario, const PriceVector& prices);

/// Maximal valuation intervals of [lo, hi] with a constant substitute choice. Uniform valuations only.
std::vector<Segment> segment_substitute(const Scenario& scenario, const PriceVector& prices);

DemandResult demand_substitute(const Scenario& scenario, const PriceVector& prices);
DemandResult demand_complementary(const Scenario& scenario, const PriceVector& prices);

/// Participation threshold (P_f(S) + sum p) / P_d(S) of a complementary market; +inf when P_d(S) = 0.
double complementary_threshold(const Scenario& scenario, const PriceVector& prices);

/// Sampled demand from `n_samples` valuations drawn with a seeded mt19937_64. Bit-exact for
/// identical inputs.
DemandResult demand_monte_carlo(const Scenario& scenario, const PriceVector& prices, std::size_t n_samples,
                                std::uint64_t seed);

/// Exact demand under the empirical measure of the sample list (every sample weighted 1/n).
DemandResult demand_empirical(const Scenario& scenario, const PriceVector& prices);

/// Mode- and valuation-appropriate exact demand: analytic for uniform, enumeration for empirical.
DemandResult demand(const Scenario& scenario, const PriceVector& prices);

}  // namespace infomarket
