#include <cmath>

#include <doctest.h>

#include "obed/experiments.hpp"
#include "obed/model.hpp"
#include "helpers.hpp"

using namespace obed;
using namespace testutil;

TEST_CASE("latency evaluates the affine model") {
    const InstanceData geo = build_geometric_instance();
    CHECK(latency(geo.inst, 0, 0, 0.55) == doctest::Approx(0.654).epsilon(1e-12));

    SplitMixRng rng(7);
    const GameInstance inst = random_instance(rng, 3, 2);
    for (std::size_t e = 0; e < 3; ++e)
        for (std::size_t w = 0; w < 2; ++w)
            CHECK(latency(inst, w, e, 0.0) == inst.intercept[e][w]);

    const GameInstance two = two_edge_instance();
    CHECK(latency(two, 1, 1, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("social cost of a profile") {
    const InstanceData geo = build_geometric_instance();
    CHECK(social_cost_profile(geo.inst, 0, {0.55, 0.25, 0.20}) ==
          doctest::Approx(0.9311).epsilon(1e-4));

    GameInstance flat(2, 1, {1.0}, {{0.7}, {0.3}}, {{0.0}, {0.0}});
    CHECK(social_cost_profile(flat, 0, {1.0, 0.0}) == doctest::Approx(0.7));
    CHECK(social_cost_profile(flat, 0, {0.0, 1.0}) == doctest::Approx(0.3));

    const GameInstance two = two_edge_instance();
    CHECK(social_cost_profile(two, 0, {1.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("delta is the action-versus-recommendation cost gap") {
    const GameInstance two = two_edge_instance();
    CHECK(delta(two, 0, 1, 0, {1.0, 0.0}) == doctest::Approx(2.0));
    CHECK(delta(two, 0, 1, 1, {1.0, 0.0}) == doctest::Approx(-1.0));

    GameInstance sym(2, 1, {1.0}, {{0.5}, {0.5}}, {{0.3}, {0.3}});
    CHECK(delta(sym, 0, 1, 0, {0.5, 0.5}) == doctest::Approx(0.0));

    CHECK_THROWS_AS(delta(two, 1, 1, 0, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("obedience slack closed form on the two-edge instance") {
    const GameInstance two = two_edge_instance();
    const RecommendationSet X = two_edge_profiles();
    const SignalingPolicy pi = always_first_policy();
    const DeviationPair pair{0, 1};

    SplitMixRng rng(11);
    for (int t = 0; t < 50; ++t) {
        const double mu1 = rng.uniform();
        const double got = obedience_slack(two, X, pi, {mu1, 1.0 - mu1}, pair);
        CHECK(std::abs(got - (3.0 * mu1 - 1.0)) <= 1e-12);
    }
    CHECK(std::abs(obedience_slack(two, X, pi, two.prior, pair)) <= 1e-12);

    // Route 2 carries no mass under this policy.
    CHECK(obedience_slack(two, X, pi, two.prior, {1, 0}) == 0.0);
}

TEST_CASE("deviation vector decomposes the slack") {
    const GameInstance two = two_edge_instance();
    const RecommendationSet X = two_edge_profiles();

    const auto d = deviation_vector(two, X, always_first_policy(), {0, 1});
    CHECK(d[0] == doctest::Approx(2.0));
    CHECK(d[1] == doctest::Approx(-1.0));

    const auto zero = deviation_vector(two, X, always_first_policy(), {1, 0});
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);

    const InstanceData geo = build_geometric_instance();
    const auto dv =
        deviation_vector(geo.inst, geo.profiles, policy_from_p(1.0, 1.0), {0, 1});
    CHECK(dv[0] == doctest::Approx(0.4433).epsilon(1e-4));
}

TEST_CASE("expected cost") {
    GameInstance single(2, 1, {1.0}, {{0.4}, {0.6}}, {{0.1}, {0.2}});
    RecommendationSet X1({{0.5, 0.5}});
    SignalingPolicy pi1({{1.0}});
    CHECK(expected_cost(single, X1, pi1) ==
          doctest::Approx(social_cost_profile(single, 0, {0.5, 0.5})));

    const GameInstance two = two_edge_instance();
    CHECK(expected_cost(two, two_edge_profiles(), always_first_policy()) ==
          doctest::Approx(4.0 / 3.0));
}

TEST_CASE("slack and cost are linear in the policy") {
    SplitMixRng rng(23);
    const GameInstance inst = random_instance(rng, 3, 3);
    const RecommendationSet X = random_profiles(rng, 3, 4);
    for (int t = 0; t < 100; ++t) {
        const SignalingPolicy a = random_policy(rng, 3, 4);
        const SignalingPolicy b = random_policy(rng, 3, 4);
        const double lam = rng.uniform();
        std::vector<std::vector<double>> mix(3, std::vector<double>(4, 0.0));
        for (std::size_t w = 0; w < 3; ++w)
            for (std::size_t k = 0; k < 4; ++k)
                mix[w][k] = lam * a.weights[w][k] + (1.0 - lam) * b.weights[w][k];
        const SignalingPolicy m(mix);
        const std::vector<double> mu = random_simplex(rng, 3);

        CHECK(std::abs(expected_cost(inst, X, m) -
                       (lam * expected_cost(inst, X, a) +
                        (1.0 - lam) * expected_cost(inst, X, b))) <= 1e-12);
        for (const DeviationPair& pair : deviation_pairs(3))
            CHECK(std::abs(obedience_slack(inst, X, m, mu, pair) -
                           (lam * obedience_slack(inst, X, a, mu, pair) +
                            (1.0 - lam) * obedience_slack(inst, X, b, mu, pair))) <=
                  1e-12);
    }
}

TEST_CASE("slack equals the belief inner product with the deviation vector") {
    SplitMixRng rng(31);
    for (int t = 0; t < 50; ++t) {
        const GameInstance inst = random_instance(rng, 3, 4);
        const RecommendationSet X = random_profiles(rng, 3, 3);
        const SignalingPolicy pi = random_policy(rng, 4, 3);
        const std::vector<double> mu = random_simplex(rng, 4);
        for (const DeviationPair& pair : deviation_pairs(3)) {
            const auto d = deviation_vector(inst, X, pi, pair);
            double dot = 0.0;
            for (std::size_t w = 0; w < 4; ++w) dot += mu[w] * d[w];
            CHECK(std::abs(obedience_slack(inst, X, pi, mu, pair) - dot) <= 1e-12);
        }
    }
}

TEST_CASE("recommendation masses") {
    const GameInstance two = two_edge_instance();
    const RecommendationSet X = two_edge_profiles();

    const auto m0 = recommendation_masses(X, always_first_policy(), two.prior);
    CHECK(m0.per_state[0][0] == doctest::Approx(1.0));
    CHECK(m0.per_state[0][1] == doctest::Approx(1.0));
    CHECK(m0.average[0] == doctest::Approx(1.0));
    CHECK(m0.average[1] == doctest::Approx(0.0));

    const SignalingPolicy half({{0.5, 0.5}, {0.5, 0.5}});
    const auto mh = recommendation_masses(X, half, two.prior);
    CHECK(mh.average[0] == doctest::Approx(0.5));
    CHECK(mh.average[1] == doctest::Approx(0.5));

    const auto mn = recommendation_masses(X, statewise_policy(), two.prior);
    CHECK(mn.average[0] == doctest::Approx(1.0 / 3.0));

    SplitMixRng rng(5);
    const RecommendationSet rx = random_profiles(rng, 4, 3);
    const SignalingPolicy rp = random_policy(rng, 2, 3);
    const auto mm = recommendation_masses(rx, rp, {0.25, 0.75});
    for (std::size_t w = 0; w < 2; ++w) {
        double sum = 0.0;
        for (std::size_t r = 0; r < 4; ++r) sum += mm.per_state[r][w];
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("support patterns") {
    const RecommendationSet X = two_edge_profiles();

    const auto det = support_pattern_of(X, always_first_policy());
    CHECK(det.gamma.size() == 2);

    SplitMixRng rng(3);
    const SignalingPolicy full = random_policy(rng, 2, 2);
    CHECK(support_pattern_of(X, full).gamma.size() == 4);

    const auto nash = support_pattern_of(X, statewise_policy());
    const auto s1 = nash.per_route(X, 0);
    const auto s2 = nash.per_route(X, 1);
    REQUIRE(s1.size() == 1);
    REQUIRE(s2.size() == 1);
    CHECK(s1.count({0, 0}) == 1);
    CHECK(s2.count({1, 1}) == 1);
}

TEST_CASE("input validation") {
    CHECK_THROWS(GameInstance(2, 2, {0.5, 0.6}, {{0, 0}, {0, 0}}, {{0, 0}, {0, 0}}));
    CHECK_THROWS(GameInstance(2, 2, {0.5, 0.5}, {{-1, 0}, {0, 0}}, {{0, 0}, {0, 0}}));
    CHECK_THROWS(RecommendationSet({{0.5, 0.6}}));
    CHECK_THROWS(RecommendationSet({{0.5, 0.5}, {0.5, 0.5}}));
    CHECK_THROWS(SignalingPolicy({{0.5, 0.4}}));
    CHECK_THROWS(Belief({0.5, 0.4}));
}
