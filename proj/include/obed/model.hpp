#pragma once

// Game primitives for information design on parallel congestion networks:
// affine latencies per (edge, state), recommendation profiles on the edge
// simplex, per-state signaling policies, and the evaluation formulas built
// on them (social cost, obedience slacks, deviation vectors, masses,
// support patterns).

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "obed/common.hpp"

namespace obed {

// Parallel network with |E| edges, |Omega| states, prior mu0, and affine
// latency l_e^w(f) = slope[e][w] * f + intercept[e][w]. Zero slopes are
// admitted (constant latencies); all coefficients must be nonnegative.
struct GameInstance {
    std::size_t edge_count = 0;
    std::size_t state_count = 0;
    std::vector<double> prior;                   // |Omega|
    std::vector<std::vector<double>> slope;      // [e][w]
    std::vector<std::vector<double>> intercept;  // [e][w]

    GameInstance(std::size_t edges, std::size_t states,
                 std::vector<double> prior_in,
                 std::vector<std::vector<double>> slope_in,
                 std::vector<std::vector<double>> intercept_in);
};

// Finite recommendation set X = {x^(1),...,x^(K)}, each profile on the edge
// simplex. Duplicates (exact equality) are rejected.
struct RecommendationSet {
    std::vector<std::vector<double>> profiles;  // [k][e]

    explicit RecommendationSet(std::vector<std::vector<double>> profiles_in);

    std::size_t size() const { return profiles.size(); }
    const std::vector<double>& operator[](std::size_t k) const { return profiles[k]; }
};

// Per-state distribution over recommendation profiles: weights[w][k].
struct SignalingPolicy {
    std::vector<std::vector<double>> weights;

    explicit SignalingPolicy(std::vector<std::vector<double>> weights_in);

    std::size_t state_count() const { return weights.size(); }
    std::size_t profile_count() const { return weights.empty() ? 0 : weights[0].size(); }
};

// A probability vector over states.
struct Belief {
    std::vector<double> mu;

    explicit Belief(std::vector<double> mu_in);
};

// Ordered deviation pair: recommendation r, action a, r != a.
struct DeviationPair {
    std::size_t r = 0;
    std::size_t a = 0;

    friend bool operator==(const DeviationPair&, const DeviationPair&) = default;
};

// All ordered pairs in row-major order (r outer, a inner, skipping r == a).
std::vector<DeviationPair> deviation_pairs(std::size_t edge_count);

// Support pattern: gamma is the set of (state, profile) pairs carrying
// policy mass; the per-route sets S_r are always derived from gamma.
struct SupportPattern {
    std::set<std::pair<std::size_t, std::size_t>> gamma;

    // S_r = gamma restricted to profiles with x^(k)_r > 0.
    std::set<std::pair<std::size_t, std::size_t>> per_route(
        const RecommendationSet& X, std::size_t r) const;
};

double latency(const GameInstance& inst, std::size_t omega, std::size_t e, double f);

// sum_e x_e * l_e^w(x_e)
double social_cost_profile(const GameInstance& inst, std::size_t omega,
                           const std::vector<double>& x);

// Delta_{r,a}(w, x) = l_a^w(x_a) - l_r^w(x_r)
double delta(const GameInstance& inst, std::size_t r, std::size_t a,
             std::size_t omega, const std::vector<double>& x);

// A_{r,a}(pi; mu) = sum_w mu(w) sum_k pi[w][k] x^(k)_r Delta_{r,a}(w, x^(k))
double obedience_slack(const GameInstance& inst, const RecommendationSet& X,
                       const SignalingPolicy& pi, const std::vector<double>& mu,
                       const DeviationPair& pair);

// D_{r,a}(pi) with D[w] = sum_k pi[w][k] x^(k)_r Delta_{r,a}(w, x^(k));
// obedience_slack(mu) == dot(mu, D) for every mu.
std::vector<double> deviation_vector(const GameInstance& inst,
                                     const RecommendationSet& X,
                                     const SignalingPolicy& pi,
                                     const DeviationPair& pair);

// Expected system cost under the instance prior.
double expected_cost(const GameInstance& inst, const RecommendationSet& X,
                     const SignalingPolicy& pi);

struct RecommendationMasses {
    std::vector<std::vector<double>> per_state;  // m[r][w]
    std::vector<double> average;                 // mbar[r] = sum_w mu0(w) m[r][w]
};

RecommendationMasses recommendation_masses(const RecommendationSet& X,
                                           const SignalingPolicy& pi,
                                           const std::vector<double>& mu0);

// gamma = {(w,k) : pi[w][k] > kSupportTol}
SupportPattern support_pattern_of(const RecommendationSet& X, const SignalingPolicy& pi);

}  // namespace obed
