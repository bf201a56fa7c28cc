#pragma once

// Executable finite-support reduction: compresses each state's distribution
// over recommendation profiles to at most |J|+2 atoms while preserving the
// expected cost and every obedience slack at every belief.

#include <cstddef>
#include <vector>

#include "obed/model.hpp"

namespace obed {

struct ReductionResult {
    SignalingPolicy policy;          // over the reduced set
    RecommendationSet profiles;      // union of surviving atoms across states
    std::vector<std::size_t> atom_index;  // reduced profile k -> original index
};

ReductionResult caratheodory_reduce(const GameInstance& inst,
                                    const RecommendationSet& X,
                                    const SignalingPolicy& pi);

// One elimination pass on raw per-state weights against moment columns
// (rows: cost, per-pair slack terms, and an all-ones mass row). Exposed for
// testing; caratheodory_reduce drives it per state.
void reduce_weights_inplace(const std::vector<std::vector<double>>& moments,
                            std::vector<double>& weights,
                            std::size_t target_support);

}  // namespace obed
