#include "obed/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace obed {

namespace {

void check_probability_vector(const std::vector<double>& v, const char* what) {
    double sum = 0.0;
    for (double x : v) {
        if (x < 0.0)
            throw std::invalid_argument(std::string(what) + ": negative entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument(std::string(what) + ": entries do not sum to 1");
}

}  // namespace

GameInstance::GameInstance(std::size_t edges, std::size_t states,
                           std::vector<double> prior_in,
                           std::vector<std::vector<double>> slope_in,
                           std::vector<std::vector<double>> intercept_in)
    : edge_count(edges),
      state_count(states),
      prior(std::move(prior_in)),
      slope(std::move(slope_in)),
      intercept(std::move(intercept_in)) {
    if (edge_count == 0 || state_count == 0)
        throw std::invalid_argument("GameInstance: needs at least one edge and one state");
    if (prior.size() != state_count)
        throw std::invalid_argument("GameInstance: prior length mismatch");
    check_probability_vector(prior, "GameInstance prior");
    if (slope.size() != edge_count || intercept.size() != edge_count)
        throw std::invalid_argument("GameInstance: coefficient matrix row count mismatch");
    for (std::size_t e = 0; e < edge_count; ++e) {
        if (slope[e].size() != state_count || intercept[e].size() != state_count)
            throw std::invalid_argument("GameInstance: coefficient matrix column count mismatch");
        for (std::size_t w = 0; w < state_count; ++w) {
            if (slope[e][w] < 0.0 || intercept[e][w] < 0.0)
                throw std::invalid_argument("GameInstance: negative latency coefficient");
        }
    }
}

RecommendationSet::RecommendationSet(std::vector<std::vector<double>> profiles_in)
    : profiles(std::move(profiles_in)) {
    if (profiles.empty())
        throw std::invalid_argument("RecommendationSet: needs at least one profile");
    const std::size_t edges = profiles[0].size();
    for (const auto& x : profiles) {
        if (x.size() != edges)
            throw std::invalid_argument("RecommendationSet: inconsistent profile length");
        check_probability_vector(x, "RecommendationSet profile");
    }
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (std::size_t j = i + 1; j < profiles.size(); ++j)
            if (profiles[i] == profiles[j])
                throw std::invalid_argument("RecommendationSet: duplicate profile");
}

SignalingPolicy::SignalingPolicy(std::vector<std::vector<double>> weights_in)
    : weights(std::move(weights_in)) {
    if (weights.empty())
        throw std::invalid_argument("SignalingPolicy: needs at least one state row");
    const std::size_t k = weights[0].size();
    for (const auto& row : weights) {
        if (row.size() != k)
            throw std::invalid_argument("SignalingPolicy: inconsistent row length");
        check_probability_vector(row, "SignalingPolicy row");
    }
}

Belief::Belief(std::vector<double> mu_in) : mu(std::move(mu_in)) {
    check_probability_vector(mu, "Belief");
}

std::vector<DeviationPair> deviation_pairs(std::size_t edge_count) {
    std::vector<DeviationPair> pairs;
    pairs.reserve(edge_count * (edge_count - 1));
    for (std::size_t r = 0; r < edge_count; ++r)
        for (std::size_t a = 0; a < edge_count; ++a)
            if (r != a) pairs.push_back({r, a});
    return pairs;
}

std::set<std::pair<std::size_t, std::size_t>> SupportPattern::per_route(
    const RecommendationSet& X, std::size_t r) const {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [w, k] : gamma)
        if (X[k][r] > 0.0) out.insert({w, k});
    return out;
}

double latency(const GameInstance& inst, std::size_t omega, std::size_t e, double f) {
    if (e >= inst.edge_count || omega >= inst.state_count)
        throw std::invalid_argument("latency: index out of range");
    return inst.slope[e][omega] * f + inst.intercept[e][omega];
}

double social_cost_profile(const GameInstance& inst, std::size_t omega,
                           const std::vector<double>& x) {
    if (x.size() != inst.edge_count)
        throw std::invalid_argument("social_cost_profile: profile length mismatch");
    double cost = 0.0;
    for (std::size_t e = 0; e < inst.edge_count; ++e)
        cost += x[e] * latency(inst, omega, e, x[e]);
    return cost;
}

double delta(const GameInstance& inst, std::size_t r, std::size_t a,
             std::size_t omega, const std::vector<double>& x) {
    if (r == a)
        throw std::invalid_argument("delta: recommendation equals action");
    return latency(inst, omega, a, x[a]) - latency(inst, omega, r, x[r]);
}

double obedience_slack(const GameInstance& inst, const RecommendationSet& X,
                       const SignalingPolicy& pi, const std::vector<double>& mu,
                       const DeviationPair& pair) {
    if (mu.size() != inst.state_count)
        throw std::invalid_argument("obedience_slack: belief length mismatch");
    const std::vector<double> d = deviation_vector(inst, X, pi, pair);
    double slack = 0.0;
    for (std::size_t w = 0; w < inst.state_count; ++w) slack += mu[w] * d[w];
    return slack;
}

std::vector<double> deviation_vector(const GameInstance& inst,
                                     const RecommendationSet& X,
                                     const SignalingPolicy& pi,
                                     const DeviationPair& pair) {
    if (pi.state_count() != inst.state_count || pi.profile_count() != X.size())
        throw std::invalid_argument("deviation_vector: policy dimension mismatch");
    std::vector<double> d(inst.state_count, 0.0);
    for (std::size_t w = 0; w < inst.state_count; ++w) {
        for (std::size_t k = 0; k < X.size(); ++k) {
            const double mass = pi.weights[w][k] * X[k][pair.r];
            if (mass != 0.0)
                d[w] += mass * delta(inst, pair.r, pair.a, w, X[k]);
        }
    }
    return d;
}

double expected_cost(const GameInstance& inst, const RecommendationSet& X,
                     const SignalingPolicy& pi) {
    if (pi.state_count() != inst.state_count || pi.profile_count() != X.size())
        throw std::invalid_argument("expected_cost: policy dimension mismatch");
    double cost = 0.0;
    for (std::size_t w = 0; w < inst.state_count; ++w)
        for (std::size_t k = 0; k < X.size(); ++k)
            if (pi.weights[w][k] != 0.0)
                cost += inst.prior[w] * pi.weights[w][k] * social_cost_profile(inst, w, X[k]);
    return cost;
}

RecommendationMasses recommendation_masses(const RecommendationSet& X,
                                           const SignalingPolicy& pi,
                                           const std::vector<double>& mu0) {
    const std::size_t edges = X[0].size();
    const std::size_t states = pi.state_count();
    RecommendationMasses m;
    m.per_state.assign(edges, std::vector<double>(states, 0.0));
    m.average.assign(edges, 0.0);
    for (std::size_t r = 0; r < edges; ++r) {
        for (std::size_t w = 0; w < states; ++w) {
            double mass = 0.0;
            for (std::size_t k = 0; k < X.size(); ++k)
                mass += pi.weights[w][k] * X[k][r];
            m.per_state[r][w] = mass;
            m.average[r] += mu0[w] * mass;
        }
    }
    return m;
}

SupportPattern support_pattern_of(const RecommendationSet& X, const SignalingPolicy& pi) {
    (void)X;
    SupportPattern s;
    for (std::size_t w = 0; w < pi.state_count(); ++w)
        for (std::size_t k = 0; k < pi.profile_count(); ++k)
            if (pi.weights[w][k] > kSupportTol) s.gamma.insert({w, k});
    return s;
}

}  // namespace obed
