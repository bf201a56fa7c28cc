#pragma once

#include <cmath>
#include <vector>

#include "obed/model.hpp"
#include "obed/rng.hpp"

namespace testutil {

using namespace obed;

inline std::vector<double> random_simplex(SplitMixRng& rng, std::size_t n) {
    std::vector<double> v(n);
    double s = 0.0;
    for (double& x : v) s += (x = -std::log(1.0 - rng.uniform()));
    for (double& x : v) x /= s;
    return v;
}

inline GameInstance random_instance(SplitMixRng& rng, std::size_t edges,
                                    std::size_t states, double slope_lo = 0.1,
                                    double slope_hi = 1.0) {
    std::vector<std::vector<double>> a(edges, std::vector<double>(states));
    std::vector<std::vector<double>> b(edges, std::vector<double>(states));
    for (std::size_t e = 0; e < edges; ++e)
        for (std::size_t w = 0; w < states; ++w) {
            a[e][w] = rng.uniform(slope_lo, slope_hi);
            b[e][w] = rng.uniform(0.2, 1.5);
        }
    return GameInstance(edges, states, random_simplex(rng, states), std::move(a),
                        std::move(b));
}

inline RecommendationSet random_profiles(SplitMixRng& rng, std::size_t edges,
                                         std::size_t K) {
    std::vector<std::vector<double>> profiles;
    for (std::size_t k = 0; k < K; ++k) profiles.push_back(random_simplex(rng, edges));
    return RecommendationSet(std::move(profiles));
}

inline SignalingPolicy random_policy(SplitMixRng& rng, std::size_t states,
                                     std::size_t K) {
    std::vector<std::vector<double>> w(states);
    for (auto& row : w) row = random_simplex(rng, K);
    return SignalingPolicy(std::move(w));
}

// Two constant-latency edges, two states: l_1 = (0, 2), l_2 = (2, 1),
// prior (1/3, 2/3). The policy always recommending (1, 0) is exactly
// obedient at the prior and loses obedience under any belief perturbation.
inline GameInstance two_edge_instance() {
    return GameInstance(2, 2, {1.0 / 3.0, 2.0 / 3.0}, {{0, 0}, {0, 0}},
                        {{0, 2}, {2, 1}});
}

inline RecommendationSet two_edge_profiles() {
    return RecommendationSet({{1, 0}, {0, 1}});
}

inline SignalingPolicy always_first_policy() {
    return SignalingPolicy({{1, 0}, {1, 0}});
}

inline SignalingPolicy statewise_policy() {
    return SignalingPolicy({{1, 0}, {0, 1}});
}

}  // namespace testutil
