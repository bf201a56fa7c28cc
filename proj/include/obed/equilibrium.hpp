#pragma once

// Statewise Wardrop (Nash) equilibrium flows on parallel affine networks,
// equilibrium verification, and the deterministic Nash recommendation policy.

#include <cstddef>
#include <vector>

#include "obed/model.hpp"

namespace obed {

struct FlowProfile {
    std::vector<double> flow;

    explicit FlowProfile(std::vector<double> flow_in);
};

// Closed-form water-filling over candidate active sets sorted by intercept.
// Among zero-slope edges tied at the equilibrium level, residual demand goes
// to the lowest-index edge.
FlowProfile nash_flow(const GameInstance& inst, std::size_t omega);

struct NashCheck {
    bool ok = false;
    double worst_violation = 0.0;
};

// True iff every positively used edge has latency within tol of the minimum.
NashCheck verify_nash(const GameInstance& inst, std::size_t omega,
                      const FlowProfile& f, double tol);

// Puts mass 1 on the profile of X matching nash_flow(inst, w) in l-inf
// distance 1e-9, per state. Throws MissingNashProfile if a state has none.
SignalingPolicy nash_policy(const GameInstance& inst, const RecommendationSet& X);

}  // namespace obed
