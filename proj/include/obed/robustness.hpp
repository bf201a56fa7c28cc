#pragma once

// Worst-case-belief evaluation, robust obedience membership, exact and
// certified robustness radii, and the support-pattern decomposition that
// maximizes the certified radius over all policies.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "obed/lp.hpp"
#include "obed/model.hpp"

namespace obed {

// Belief-space norm choice; q is the dual exponent (1/p + 1/q = 1).
struct NormChoice {
    int p = 1;

    double dual_exponent() const {
        if (p == 1) return std::numeric_limits<double>::infinity();
        if (p == 2) return 2.0;
        return 1.0;  // p = inf
    }
    // |Omega|^{1/q}: 1 for p=1, sqrt(|Omega|) for p=2, |Omega| for p=inf.
    double certificate_constant(std::size_t state_count) const;
    // Radius beyond which the norm ball covers the whole simplex.
    double ball_cap() const { return p == 1 ? 2.0 : 1.0; }

    static NormChoice l1() { return {1}; }
    static NormChoice l2() { return {2}; }
    static NormChoice linf() { return {3}; }
    bool is_inf() const { return p != 1 && p != 2; }
};

// Conservative drops the simplex constraint on the belief ball (closed-form
// dual-norm penalty); ExactSimplex solves the inner minimization over the
// simplex-intersected ball as an LP (p in {1, inf} only).
enum class RobustnessMode { Conservative, ExactSimplex };

double dual_norm(const std::vector<double>& z, const NormChoice& norm);

struct WorstCaseSlack {
    double value = 0.0;
    std::vector<double> belief;  // argmin; on the simplex only in exact mode
};

WorstCaseSlack worst_case_slack(const GameInstance& inst, const RecommendationSet& X,
                                const SignalingPolicy& pi, const DeviationPair& pair,
                                double epsilon, const NormChoice& norm,
                                RobustnessMode mode);

struct ObedienceCheck {
    bool obedient = false;
    struct Violation {
        DeviationPair pair;
        double slack;
    };
    std::vector<Violation> violated;  // sorted by slack ascending
};

ObedienceCheck is_robust_obedient(const GameInstance& inst, const RecommendationSet& X,
                                  const SignalingPolicy& pi, double epsilon,
                                  const NormChoice& norm, RobustnessMode mode);

// Largest epsilon with robust obedience; +infinity when robust at the
// norm-ball cap. Returns 0 for nominally disobedient policies.
double robust_radius(const GameInstance& inst, const RecommendationSet& X,
                     const SignalingPolicy& pi, const NormChoice& norm,
                     RobustnessMode mode);

struct CertificateReport {
    struct PairTerm {
        DeviationPair pair;
        double sigma_lo = 0.0;
        double sigma_hi = 0.0;
        double big_m = 0.0;
        double mass = 0.0;       // mbar_r
        double rho_term = 0.0;   // sigma_lo * mass / (|Omega|^{1/q} * M)
        bool contributing = false;  // mbar_r > 0
    };
    std::vector<PairTerm> pairs;
    double rho_hat = 0.0;  // clamped at 0
    bool vacuous = false;  // some contributing sigma_lo <= 0
};

CertificateReport certified_radius(const GameInstance& inst, const RecommendationSet& X,
                                   const SignalingPolicy& pi, const NormChoice& norm);

// Verifies the support-restricted bounds chain for one pair.
bool lemma1_check(const GameInstance& inst, const RecommendationSet& X,
                  const SignalingPolicy& pi, const DeviationPair& pair,
                  const NormChoice& norm);

struct PatternLpResult {
    double rho = 0.0;  // unclamped; may be negative or +infinity
    SignalingPolicy policy;
};

// Maximize rho over policies consistent with the pattern: sigma_lo(S) *
// mbar_r(pi) >= rho * |Omega|^{1/q} * M(S) per pair with nonempty S_r.
PatternLpResult pattern_lp(const GameInstance& inst, const RecommendationSet& X,
                           const SupportPattern& pattern, const NormChoice& norm);

enum class Exec { Serial, Parallel };

struct PatternSearchResult {
    double rho_raw = -std::numeric_limits<double>::infinity();
    double rho = 0.0;  // clamped at 0
    SupportPattern best_pattern;
    SignalingPolicy best_policy;
    bool complete = false;
    std::uint64_t patterns_evaluated = 0;
};

// Enumerates per-state nonempty subsets of Omega x X when the pattern count
// fits the budget (complete maximum); otherwise evaluates all
// singleton-per-state patterns plus the full pattern (a valid lower bound).
PatternSearchResult certified_radius_star(const GameInstance& inst,
                                          const RecommendationSet& X,
                                          const NormChoice& norm,
                                          std::uint64_t budget = 100000,
                                          Exec exec = Exec::Parallel);

// Samples agent beliefs from U_eps(mu0) and reports the obedient fraction.
double population_check(const GameInstance& inst, const RecommendationSet& X,
                        const SignalingPolicy& pi, double epsilon,
                        const NormChoice& norm, std::size_t n_agents,
                        std::uint64_t seed);

}  // namespace obed
