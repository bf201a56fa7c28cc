#include <algorithm>
#include <cmath>
#include <numeric>

#include <doctest.h>

#include "obed/lp.hpp"
#include "obed/rng.hpp"
#include "helpers.hpp"

using namespace obed;
using namespace testutil;

namespace {

double duality_residual(const LinearProgram& lp, const LpSolution& sol) {
    return std::abs(sol.objective - sol.dual_objective) /
           (1.0 + std::abs(sol.objective));
}

}  // namespace

TEST_CASE("bounded single-variable program and its dual") {
    LinearProgram lp;
    lp.objective = {-1.0};
    lp.rows.push_back({{1.0}, Relation::LessEqual, 1.0});
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.primal[0] == doctest::Approx(1.0));
    CHECK(sol.objective == doctest::Approx(-1.0));
    CHECK(sol.duals[0] == doctest::Approx(1.0));
    CHECK(sol.dual_objective == doctest::Approx(-1.0));
}

TEST_CASE("infeasible and unbounded detection") {
    LinearProgram inf;
    inf.objective = {1.0};
    inf.rows.push_back({{1.0}, Relation::LessEqual, -1.0});
    CHECK(solve_lp(inf).status == LpStatus::Infeasible);

    LinearProgram eq;
    eq.objective = {0.0, 0.0};
    eq.rows.push_back({{1.0, 1.0}, Relation::Equal, 1.0});
    eq.rows.push_back({{1.0, 1.0}, Relation::Equal, 2.0});
    CHECK(solve_lp(eq).status == LpStatus::Infeasible);

    LinearProgram unb;
    unb.objective = {-1.0};
    unb.rows.push_back({{1.0}, Relation::GreaterEqual, 1.0});
    CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("free and shifted variable bounds") {
    LinearProgram lp;
    lp.objective = {1.0};
    lp.rows.push_back({{1.0}, Relation::GreaterEqual, -3.0});
    lp.lower = {-kLpInf};
    lp.upper = {kLpInf};
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.primal[0] == doctest::Approx(-3.0));

    LinearProgram box;
    box.objective = {-1.0, 2.0};
    box.rows.push_back({{1.0, 1.0}, Relation::LessEqual, 10.0});
    box.lower = {0.5, 1.0};
    box.upper = {4.0, kLpInf};
    const LpSolution sb = solve_lp(box);
    REQUIRE(sb.status == LpStatus::Optimal);
    CHECK(sb.primal[0] == doctest::Approx(4.0));
    CHECK(sb.primal[1] == doctest::Approx(1.0));
    CHECK(sb.objective == doctest::Approx(-2.0));
}

TEST_CASE("transportation-style program") {
    // min x11 + 2 x12 + 3 x21 + x22 with row/column sums fixed.
    LinearProgram lp;
    lp.objective = {1.0, 2.0, 3.0, 1.0};
    lp.rows.push_back({{1.0, 1.0, 0.0, 0.0}, Relation::Equal, 1.0});
    lp.rows.push_back({{0.0, 0.0, 1.0, 1.0}, Relation::Equal, 1.0});
    lp.rows.push_back({{1.0, 0.0, 1.0, 0.0}, Relation::Equal, 1.0});
    lp.rows.push_back({{0.0, 1.0, 0.0, 1.0}, Relation::Equal, 1.0});
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(2.0));
    CHECK(sol.primal[0] == doctest::Approx(1.0));
    CHECK(sol.primal[3] == doctest::Approx(1.0));
    CHECK(duality_residual(lp, sol) <= 1e-9);
}

TEST_CASE("strong duality holds on random feasible programs") {
    SplitMixRng rng(42);
    for (int t = 0; t < 400; ++t) {
        const std::size_t n = 2 + (std::size_t)(rng.uniform() * 8.0);
        const std::size_t m = 1 + (std::size_t)(rng.uniform() * 6.0);
        // Build around a known interior point so the program is feasible.
        std::vector<double> x0(n);
        for (double& v : x0) v = rng.uniform(0.1, 2.0);

        LinearProgram lp;
        lp.objective.resize(n);
        for (double& c : lp.objective) c = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < m; ++i) {
            LinearProgram::Row row;
            row.coeffs.resize(n);
            double ax = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row.coeffs[j] = rng.uniform(-1.0, 1.0);
                ax += row.coeffs[j] * x0[j];
            }
            const double u = rng.uniform();
            if (u < 0.4) {
                row.rel = Relation::LessEqual;
                row.rhs = ax + rng.uniform(0.0, 1.0);
            } else if (u < 0.8) {
                row.rel = Relation::GreaterEqual;
                row.rhs = ax - rng.uniform(0.0, 1.0);
            } else {
                row.rel = Relation::Equal;
                row.rhs = ax;
            }
            lp.rows.push_back(row);
        }
        // Cap every variable so the program stays bounded.
        lp.lower.assign(n, 0.0);
        lp.upper.assign(n, 5.0);

        const LpSolution sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(duality_residual(lp, sol) <= 1e-7);

        // Primal feasibility of the reported point.
        for (const auto& row : lp.rows) {
            double ax = std::inner_product(row.coeffs.begin(), row.coeffs.end(),
                                           sol.primal.begin(), 0.0);
            if (row.rel == Relation::LessEqual) CHECK(ax <= row.rhs + 1e-7);
            if (row.rel == Relation::GreaterEqual) CHECK(ax >= row.rhs - 1e-7);
            if (row.rel == Relation::Equal) CHECK(std::abs(ax - row.rhs) <= 1e-7);
        }
    }
}

TEST_CASE("row order does not change the optimal value") {
    SplitMixRng rng(77);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 3;
        LinearProgram lp;
        lp.objective = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        for (int i = 0; i < 4; ++i) {
            LinearProgram::Row row;
            for (std::size_t j = 0; j < n; ++j)
                row.coeffs.push_back(rng.uniform(-1.0, 1.0));
            row.rel = Relation::LessEqual;
            row.rhs = rng.uniform(0.5, 2.0);
            lp.rows.push_back(row);
        }
        lp.lower.assign(n, 0.0);
        lp.upper.assign(n, 3.0);

        LinearProgram rev = lp;
        std::reverse(rev.rows.begin(), rev.rows.end());

        const LpSolution a = solve_lp(lp);
        const LpSolution b = solve_lp(rev);
        REQUIRE(a.status == LpStatus::Optimal);
        REQUIRE(b.status == LpStatus::Optimal);
        CHECK(std::abs(a.objective - b.objective) <= 1e-9 * (1.0 + std::abs(a.objective)));
    }
}

TEST_CASE("degenerate program terminates") {
    // Klee-Minty-style stack of redundant rows around a single vertex.
    LinearProgram lp;
    const std::size_t n = 6;
    lp.objective.assign(n, -1.0);
    for (std::size_t i = 0; i < n; ++i) {
        LinearProgram::Row row;
        row.coeffs.assign(n, 0.0);
        for (std::size_t j = 0; j <= i; ++j) row.coeffs[j] = 1.0;
        row.rel = Relation::LessEqual;
        row.rhs = 1.0;
        lp.rows.push_back(row);
        lp.rows.push_back(row);  // duplicate rows force degenerate pivots
    }
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-1.0));
}
