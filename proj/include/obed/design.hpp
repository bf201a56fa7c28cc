#pragma once

// Nominal and robust information design as linear programs over the policy
// simplex: minimize expected system cost subject to (robust) obedience.

#include <optional>
#include <vector>

#include "obed/lp.hpp"
#include "obed/model.hpp"
#include "obed/robustness.hpp"

namespace obed {

struct RobustSolveReport {
    double epsilon = 0.0;
    LpStatus status = LpStatus::Infeasible;
    std::optional<SignalingPolicy> policy;
    double value = 0.0;

    // Per ordered deviation pair, in deviation_pairs() order.
    std::vector<DeviationPair> pairs;
    std::vector<double> lambda;       // aggregate dual of the pair's rows, >= 0
    std::vector<double> slack;        // worst-case slack at the optimum
    std::vector<bool> vacuous;        // identically-zero deviation rows (dropped)
    std::vector<DeviationPair> active;  // non-vacuous with |slack| <= kActiveTol
};

// Robust design at radius epsilon. Conservative mode imposes the dual-norm
// penalty rows (p in {1, inf}); ExactSimplex embeds the LP dual of the inner
// belief minimization (p in {1, inf}). epsilon = 0 reduces to the nominal
// problem in every mode.
RobustSolveReport robust_design(const GameInstance& inst, const RecommendationSet& X,
                                double epsilon, const NormChoice& norm,
                                RobustnessMode mode);

RobustSolveReport nominal_design(const GameInstance& inst, const RecommendationSet& X);

}  // namespace obed
