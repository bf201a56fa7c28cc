#include <cmath>

#include <doctest.h>

#include "obed/equilibrium.hpp"
#include "obed/robustness.hpp"
#include "helpers.hpp"

using namespace obed;
using namespace testutil;

TEST_CASE("nash flow on small instances") {
    GameInstance sym(2, 1, {1.0}, {{1.0}, {1.0}}, {{0.0}, {0.0}});
    const FlowProfile fs = nash_flow(sym, 0);
    CHECK(fs.flow[0] == doctest::Approx(0.5));
    CHECK(fs.flow[1] == doctest::Approx(0.5));

    GameInstance skew(2, 1, {1.0}, {{1.0}, {1.0}}, {{0.0}, {1.0}});
    const FlowProfile fk = nash_flow(skew, 0);
    CHECK(fk.flow[0] == doctest::Approx(1.0));
    CHECK(fk.flow[1] == doctest::Approx(0.0));

    const GameInstance two = two_edge_instance();
    const FlowProfile f1 = nash_flow(two, 0);
    CHECK(f1.flow[0] == doctest::Approx(1.0));
    const FlowProfile f2 = nash_flow(two, 1);
    CHECK(f2.flow[1] == doctest::Approx(1.0));
}

TEST_CASE("verify_nash") {
    GameInstance sym(2, 1, {1.0}, {{1.0}, {1.0}}, {{0.0}, {0.0}});
    CHECK(verify_nash(sym, 0, FlowProfile({0.5, 0.5}), 1e-9).ok);

    const NashCheck bad = verify_nash(sym, 0, FlowProfile({1.0, 0.0}), 1e-9);
    CHECK_FALSE(bad.ok);
    CHECK(bad.worst_violation == doctest::Approx(1.0));

    const GameInstance two = two_edge_instance();
    CHECK(verify_nash(two, 1, FlowProfile({0.0, 1.0}), 1e-9).ok);
}

TEST_CASE("nash_policy matches profiles or reports the missing state") {
    const GameInstance two = two_edge_instance();
    const SignalingPolicy pi = nash_policy(two, two_edge_profiles());
    CHECK(pi.weights[0][0] == doctest::Approx(1.0));
    CHECK(pi.weights[1][1] == doctest::Approx(1.0));

    const RecommendationSet partial({{1.0, 0.0}});
    try {
        nash_policy(two, partial);
        FAIL("expected MissingNashProfile");
    } catch (const MissingNashProfile& e) {
        CHECK(e.state == 1);
    }

    GameInstance single(2, 1, {1.0}, {{1.0}, {1.0}}, {{0.0}, {1.0}});
    const SignalingPolicy ps = nash_policy(single, RecommendationSet({{1.0, 0.0}}));
    CHECK(ps.weights[0][0] == doctest::Approx(1.0));
}

TEST_CASE("nash flow always verifies on random instances") {
    SplitMixRng rng(101);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t edges = 2 + (std::size_t)(rng.uniform() * 7.0);
        const std::size_t states = 1 + (std::size_t)(rng.uniform() * 3.0);
        const GameInstance inst = random_instance(rng, edges, states,
                                                  t % 3 == 0 ? 0.0 : 0.1);
        for (std::size_t w = 0; w < states; ++w) {
            const FlowProfile f = nash_flow(inst, w);
            const NashCheck check = verify_nash(inst, w, f, 1e-8);
            CHECK(check.ok);
        }
    }
}

TEST_CASE("nash flow minimizes the Beckmann potential") {
    SplitMixRng rng(211);
    auto potential = [](const GameInstance& inst, std::size_t w,
                        const std::vector<double>& f) {
        double p = 0.0;
        for (std::size_t e = 0; e < inst.edge_count; ++e)
            p += 0.5 * inst.slope[e][w] * f[e] * f[e] + inst.intercept[e][w] * f[e];
        return p;
    };
    for (int t = 0; t < 20; ++t) {
        const std::size_t edges = 2 + (std::size_t)(rng.uniform() * 4.0);
        const GameInstance inst = random_instance(rng, edges, 1, 0.1);
        const FlowProfile f = nash_flow(inst, 0);
        const double p_star = potential(inst, 0, f.flow);
        for (int s = 0; s < 1000; ++s)
            CHECK(p_star <= potential(inst, 0, random_simplex(rng, edges)) + 1e-8);
    }
}

TEST_CASE("nash policy is robustly obedient at the ball cap") {
    SplitMixRng rng(307);
    for (int t = 0; t < 20; ++t) {
        const GameInstance inst = random_instance(rng, 3, 3, 0.1);
        std::vector<std::vector<double>> profiles;
        for (std::size_t w = 0; w < 3; ++w) {
            auto f = nash_flow(inst, w).flow;
            bool dup = false;
            for (const auto& p : profiles) {
                double dist = 0.0;
                for (std::size_t e = 0; e < 3; ++e) dist += std::abs(p[e] - f[e]);
                if (dist < 1e-12) dup = true;
            }
            if (!dup) profiles.push_back(f);
        }
        const RecommendationSet X(profiles);
        const SignalingPolicy pi = nash_policy(inst, X);
        for (const DeviationPair& pair : deviation_pairs(3)) {
            const auto wc = worst_case_slack(inst, X, pi, pair, 2.0, NormChoice::l1(),
                                             RobustnessMode::ExactSimplex);
            CHECK(wc.value >= -1e-9);
        }
    }
}
