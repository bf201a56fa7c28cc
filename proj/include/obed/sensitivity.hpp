#pragma once

// Value-function sweeps over the robustness radius, active-set extraction,
// the projected active-constraint Jacobian, and the structural slope bound
// with finite-difference validation.

#include <optional>
#include <vector>

#include "obed/design.hpp"

namespace obed {

struct SweepResult {
    std::vector<double> grid;
    std::vector<RobustSolveReport> reports;   // one per grid point
    std::optional<double> frontier;           // largest feasible grid epsilon
};

SweepResult value_sweep(const GameInstance& inst, const RecommendationSet& X,
                        const std::vector<double>& eps_grid, const NormChoice& norm,
                        RobustnessMode mode, Exec exec = Exec::Parallel);

// Pairs of an Optimal report whose worst-case slack magnitude is <= tol,
// excluding vacuous pairs. Throws NotOptimal otherwise.
std::vector<DeviationPair> active_set(const RobustSolveReport& report, double tol);

// Rows of grad_pi h_{r,a}(pi, eps) for the active pairs, projected onto the
// per-state zero-sum tangent space. Throws NondifferentiablePoint when the
// dual-norm term has a kink at pi (zero component for the l1 dual, tied
// argmax for the l-inf dual).
std::vector<std::vector<double>> projected_jacobian(
    const GameInstance& inst, const RecommendationSet& X, const SignalingPolicy& pi,
    double epsilon, const std::vector<DeviationPair>& active, const NormChoice& norm);

struct SlopeBoundReport {
    double epsilon = 0.0;
    double delta_max = 0.0;
    double kappa_omega = 0.0;
    std::size_t n_active = 0;
    double projected_cost_grad_norm = 0.0;
    double sigma_min = 0.0;
    double bound = 0.0;
    double fd_slope = 0.0;
    double envelope_estimate = 0.0;   // sum of lambda * ||D||_q (diagnostic)
    bool differentiable = false;      // stable active set and no norm kink
    bool rank_deficient = false;      // sigma_min < 1e-10: bound not asserted
};

SlopeBoundReport slope_bound(const GameInstance& inst, const RecommendationSet& X,
                             const RobustSolveReport& report, const NormChoice& norm,
                             RobustnessMode mode, double fd_step = 1e-4);

// Smallest singular value of a (rows x cols) matrix via cyclic Jacobi on the
// Gram matrix G G^T.
double min_singular_value(const std::vector<std::vector<double>>& g);

}  // namespace obed
