#pragma once

// Self-contained dense linear-program solver: two-phase simplex with
// Bland's anti-cycling rule, variable bounds, and dual extraction.
// Problem sizes here are small (hundreds of variables), so determinism and
// exact duals are prioritized over speed.

#include <cstddef>
#include <limits>
#include <vector>

#include "obed/common.hpp"

namespace obed {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LinearProgram {
    struct Row {
        std::vector<double> coeffs;
        Relation rel = Relation::LessEqual;
        double rhs = 0.0;
    };

    std::vector<double> objective;  // minimize
    std::vector<Row> rows;
    // Per-variable bounds; defaults to [0, +inf). Use -inf/+inf for free.
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t num_vars() const { return objective.size(); }

    // Sizes lower/upper to the variable count with defaults.
    void finalize_bounds();
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> primal;
    double objective = 0.0;
    // One multiplier per constraint row. Inequality duals are reported
    // nonnegative (rows canonicalized to >= form); equality duals are free.
    std::vector<double> duals;
    double dual_objective = 0.0;
};

LpSolution solve_lp(const LinearProgram& lp);

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

}  // namespace obed
