#include "obed/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "obed/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace obed {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_p(const std::vector<double>& z, int p) {
    if (p == 1) {
        double s = 0.0;
        for (double v : z) s += std::abs(v);
        return s;
    }
    if (p == 2) {
        double s = 0.0;
        for (double v : z) s += v * v;
        return std::sqrt(s);
    }
    double m = 0.0;
    for (double v : z) m = std::max(m, std::abs(v));
    return m;
}

// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0, theta = 0.0;
    std::size_t rho = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumsum += u[j];
        const double t = (cumsum - 1.0) / (double)(j + 1);
        if (u[j] - t > 0.0) {
            rho = j + 1;
            theta = t;
        }
    }
    (void)rho;
    for (double& x : v) x = std::max(0.0, x - theta);
    return v;
}

// Inner minimization of <mu, D> over U_eps(mu0) intersected with the
// simplex, as an LP (p in {1, inf}).
WorstCaseSlack exact_inner_min(const std::vector<double>& mu0,
                               const std::vector<double>& d, double epsilon,
                               const NormChoice& norm) {
    const std::size_t n = mu0.size();
    LinearProgram lp;
    if (norm.p == 1) {
        // Variables: mu (n), t (n) with t >= |mu - mu0|, sum t <= eps.
        lp.objective.assign(2 * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) lp.objective[i] = d[i];
        LinearProgram::Row simplex{std::vector<double>(2 * n, 0.0), Relation::Equal, 1.0};
        for (std::size_t i = 0; i < n; ++i) simplex.coeffs[i] = 1.0;
        lp.rows.push_back(simplex);
        for (std::size_t i = 0; i < n; ++i) {
            LinearProgram::Row up{std::vector<double>(2 * n, 0.0), Relation::GreaterEqual,
                                  -mu0[i]};
            up.coeffs[n + i] = 1.0;
            up.coeffs[i] = -1.0;
            lp.rows.push_back(up);
            LinearProgram::Row dn{std::vector<double>(2 * n, 0.0), Relation::GreaterEqual,
                                  mu0[i]};
            dn.coeffs[n + i] = 1.0;
            dn.coeffs[i] = 1.0;
            lp.rows.push_back(dn);
        }
        LinearProgram::Row budget{std::vector<double>(2 * n, 0.0), Relation::LessEqual,
                                  epsilon};
        for (std::size_t i = 0; i < n; ++i) budget.coeffs[n + i] = 1.0;
        lp.rows.push_back(budget);
    } else {
        // p = inf: per-coordinate interval bounds around mu0.
        lp.objective = d;
        lp.finalize_bounds();
        for (std::size_t i = 0; i < n; ++i) {
            lp.lower[i] = std::max(0.0, mu0[i] - epsilon);
            lp.upper[i] = std::min(1.0, mu0[i] + epsilon);
        }
        LinearProgram::Row simplex{std::vector<double>(n, 1.0), Relation::Equal, 1.0};
        lp.rows.push_back(simplex);
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw NumericalFailure("exact worst-case belief LP did not solve");
    WorstCaseSlack out;
    out.value = sol.objective;
    out.belief.assign(sol.primal.begin(), sol.primal.begin() + n);
    return out;
}

}  // namespace

double NormChoice::certificate_constant(std::size_t state_count) const {
    if (p == 1) return 1.0;
    if (p == 2) return std::sqrt((double)state_count);
    return (double)state_count;
}

double dual_norm(const std::vector<double>& z, const NormChoice& norm) {
    if (norm.p == 1) return norm_p(z, 3);   // l-inf
    if (norm.p == 2) return norm_p(z, 2);
    return norm_p(z, 1);                    // p = inf -> l1
}

WorstCaseSlack worst_case_slack(const GameInstance& inst, const RecommendationSet& X,
                                const SignalingPolicy& pi, const DeviationPair& pair,
                                double epsilon, const NormChoice& norm,
                                RobustnessMode mode) {
    if (epsilon < 0.0)
        throw std::invalid_argument("worst_case_slack: negative epsilon");
    const std::vector<double> d = deviation_vector(inst, X, pi, pair);

    if (mode == RobustnessMode::ExactSimplex) {
        if (norm.p == 2)
            throw UnsupportedNorm("exact simplex mode supports only l1 and l-inf");
        return exact_inner_min(inst.prior, d, epsilon, norm);
    }

    WorstCaseSlack out;
    const double a0 = dot(inst.prior, d);
    out.value = a0 - epsilon * dual_norm(d, norm);
    // Argmin of <mu, D> over the unconstrained norm ball around mu0.
    out.belief = inst.prior;
    if (norm.p == 1) {
        std::size_t jstar = 0;
        for (std::size_t i = 1; i < d.size(); ++i)
            if (std::abs(d[i]) > std::abs(d[jstar])) jstar = i;
        out.belief[jstar] -= epsilon * (d[jstar] >= 0.0 ? 1.0 : -1.0);
    } else if (norm.p == 2) {
        const double nd = norm_p(d, 2);
        if (nd > 0.0)
            for (std::size_t i = 0; i < d.size(); ++i)
                out.belief[i] -= epsilon * d[i] / nd;
    } else {
        for (std::size_t i = 0; i < d.size(); ++i)
            out.belief[i] -= epsilon * (d[i] >= 0.0 ? 1.0 : -1.0);
    }
    return out;
}

ObedienceCheck is_robust_obedient(const GameInstance& inst, const RecommendationSet& X,
                                  const SignalingPolicy& pi, double epsilon,
                                  const NormChoice& norm, RobustnessMode mode) {
    ObedienceCheck check;
    for (const DeviationPair& pair : deviation_pairs(inst.edge_count)) {
        const double s = worst_case_slack(inst, X, pi, pair, epsilon, norm, mode).value;
        if (s < -kFeasTol) check.violated.push_back({pair, s});
    }
    std::sort(check.violated.begin(), check.violated.end(),
              [](const auto& a, const auto& b) { return a.slack < b.slack; });
    check.obedient = check.violated.empty();
    return check;
}

double robust_radius(const GameInstance& inst, const RecommendationSet& X,
                     const SignalingPolicy& pi, const NormChoice& norm,
                     RobustnessMode mode) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto pairs = deviation_pairs(inst.edge_count);

    // Nominal obedience is a precondition for a positive radius.
    for (const DeviationPair& pair : pairs) {
        const double a0 = dot(inst.prior, deviation_vector(inst, X, pi, pair));
        if (a0 < -kFeasTol) return 0.0;
    }

    if (mode == RobustnessMode::Conservative) {
        bool all_nonneg = true;
        double radius = inf;
        for (const DeviationPair& pair : pairs) {
            const std::vector<double> d = deviation_vector(inst, X, pi, pair);
            for (double v : d)
                if (v < 0.0) all_nonneg = false;
            const double nd = dual_norm(d, norm);
            if (nd > 0.0) {
                const double a0 = dot(inst.prior, d);
                radius = std::min(radius, std::max(0.0, a0 / nd));
            }
        }
        return all_nonneg ? inf : radius;
    }

    const double cap = norm.ball_cap();
    auto feasible = [&](double eps) {
        for (const DeviationPair& pair : pairs)
            if (worst_case_slack(inst, X, pi, pair, eps, norm, mode).value < -kFeasTol)
                return false;
        return true;
    };
    if (feasible(cap)) return inf;
    double lo = 0.0, hi = cap;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

CertificateReport certified_radius(const GameInstance& inst, const RecommendationSet& X,
                                   const SignalingPolicy& pi, const NormChoice& norm) {
    CertificateReport report;
    const double kappa = norm.certificate_constant(inst.state_count);
    const RecommendationMasses masses = recommendation_masses(X, pi, inst.prior);
    double rho = std::numeric_limits<double>::infinity();
    bool any = false;

    for (const DeviationPair& pair : deviation_pairs(inst.edge_count)) {
        CertificateReport::PairTerm term;
        term.pair = pair;
        term.mass = masses.average[pair.r];
        bool has_support = false;
        for (std::size_t w = 0; w < inst.state_count; ++w) {
            for (std::size_t k = 0; k < X.size(); ++k) {
                if (pi.weights[w][k] <= kSupportTol || X[k][pair.r] <= 0.0) continue;
                const double dlt = delta(inst, pair.r, pair.a, w, X[k]);
                if (!has_support) {
                    term.sigma_lo = term.sigma_hi = dlt;
                    has_support = true;
                } else {
                    term.sigma_lo = std::min(term.sigma_lo, dlt);
                    term.sigma_hi = std::max(term.sigma_hi, dlt);
                }
            }
        }
        term.big_m = std::max(std::abs(term.sigma_lo), std::abs(term.sigma_hi));
        term.contributing = has_support && term.mass > kSupportTol;
        if (term.contributing) {
            any = true;
            term.rho_term = (term.big_m > 0.0)
                                ? term.sigma_lo * term.mass / (kappa * term.big_m)
                                : 0.0;
            rho = std::min(rho, term.rho_term);
            if (term.sigma_lo <= 0.0) report.vacuous = true;
        }
        report.pairs.push_back(term);
    }

    report.rho_hat = (!any || report.vacuous) ? (any ? 0.0 : rho) : std::max(0.0, rho);
    if (report.vacuous) report.rho_hat = 0.0;
    return report;
}

bool lemma1_check(const GameInstance& inst, const RecommendationSet& X,
                  const SignalingPolicy& pi, const DeviationPair& pair,
                  const NormChoice& norm) {
    constexpr double tol = 1e-10;
    double sigma_lo = 0.0, sigma_hi = 0.0;
    bool has_support = false;
    for (std::size_t w = 0; w < inst.state_count; ++w) {
        for (std::size_t k = 0; k < X.size(); ++k) {
            if (pi.weights[w][k] <= kSupportTol || X[k][pair.r] <= 0.0) continue;
            const double dlt = delta(inst, pair.r, pair.a, w, X[k]);
            if (!has_support) {
                sigma_lo = sigma_hi = dlt;
                has_support = true;
            } else {
                sigma_lo = std::min(sigma_lo, dlt);
                sigma_hi = std::max(sigma_hi, dlt);
            }
        }
    }
    if (!has_support) throw EmptySupport("lemma1_check: route has empty support");

    const double big_m = std::max(std::abs(sigma_lo), std::abs(sigma_hi));
    const RecommendationMasses masses = recommendation_masses(X, pi, inst.prior);
    const std::vector<double> d = deviation_vector(inst, X, pi, pair);

    bool ok = true;
    for (std::size_t w = 0; w < inst.state_count; ++w) {
        const double m = masses.per_state[pair.r][w];
        ok = ok && sigma_lo * m <= d[w] + tol && d[w] <= sigma_hi * m + tol;
    }
    const double a0 = dot(inst.prior, d);
    const double mbar = masses.average[pair.r];
    ok = ok && sigma_lo * mbar <= a0 + tol && a0 <= sigma_hi * mbar + tol;
    const double kappa = norm.certificate_constant(inst.state_count);
    ok = ok && dual_norm(d, norm) <= kappa * big_m + tol;
    return ok;
}

PatternLpResult pattern_lp(const GameInstance& inst, const RecommendationSet& X,
                           const SupportPattern& pattern, const NormChoice& norm) {
    const std::size_t states = inst.state_count;
    const std::size_t K = X.size();
    const double kappa = norm.certificate_constant(states);

    // Per-state atoms present in gamma, in (state, profile) order.
    std::vector<std::vector<std::size_t>> atoms(states);
    for (const auto& [w, k] : pattern.gamma) atoms[w].push_back(k);
    for (std::size_t w = 0; w < states; ++w)
        if (atoms[w].empty())
            throw std::invalid_argument("pattern_lp: empty per-state support");

    // Variable layout: policy entries in gamma order, then rho.
    std::vector<std::pair<std::size_t, std::size_t>> vars;
    for (std::size_t w = 0; w < states; ++w)
        for (std::size_t k : atoms[w]) vars.push_back({w, k});
    const std::size_t nv = vars.size();
    const std::size_t rho_var = nv;

    LinearProgram lp;
    lp.objective.assign(nv + 1, 0.0);
    lp.objective[rho_var] = -1.0;  // maximize rho
    lp.finalize_bounds();
    lp.lower[rho_var] = -kLpInf;

    for (std::size_t w = 0; w < states; ++w) {
        LinearProgram::Row row{std::vector<double>(nv + 1, 0.0), Relation::Equal, 1.0};
        for (std::size_t v = 0; v < nv; ++v)
            if (vars[v].first == w) row.coeffs[v] = 1.0;
        lp.rows.push_back(row);
    }

    bool any_rho_row = false;
    for (const DeviationPair& pair : deviation_pairs(inst.edge_count)) {
        double sigma_lo = 0.0, sigma_hi = 0.0;
        bool nonempty = false;
        for (const auto& [w, k] : pattern.gamma) {
            if (X[k][pair.r] <= 0.0) continue;
            const double dlt = delta(inst, pair.r, pair.a, w, X[k]);
            if (!nonempty) {
                sigma_lo = sigma_hi = dlt;
                nonempty = true;
            } else {
                sigma_lo = std::min(sigma_lo, dlt);
                sigma_hi = std::max(sigma_hi, dlt);
            }
        }
        if (!nonempty) continue;
        const double big_m = std::max(std::abs(sigma_lo), std::abs(sigma_hi));
        if (big_m <= 0.0) continue;  // all deltas vanish on the support
        LinearProgram::Row row{std::vector<double>(nv + 1, 0.0),
                               Relation::GreaterEqual, 0.0};
        for (std::size_t v = 0; v < nv; ++v) {
            const auto [w, k] = vars[v];
            row.coeffs[v] = sigma_lo * inst.prior[w] * X[k][pair.r];
        }
        row.coeffs[rho_var] = -kappa * big_m;
        lp.rows.push_back(row);
        any_rho_row = true;
    }

    auto assemble_policy = [&](const std::vector<double>& primal) {
        std::vector<std::vector<double>> weights(states, std::vector<double>(K, 0.0));
        for (std::size_t v = 0; v < nv; ++v)
            weights[vars[v].first][vars[v].second] = std::max(0.0, primal[v]);
        for (auto& row : weights) {
            const double s = std::accumulate(row.begin(), row.end(), 0.0);
            if (s > 0.0)
                for (double& x : row) x /= s;
        }
        return SignalingPolicy(std::move(weights));
    };

    if (!any_rho_row) {
        // No constraint touches rho: the certificate is unbounded.
        std::vector<double> uniform(nv + 1, 0.0);
        for (std::size_t w = 0; w < states; ++w)
            for (std::size_t v = 0; v < nv; ++v)
                if (vars[v].first == w) uniform[v] = 1.0 / (double)atoms[w].size();
        return {std::numeric_limits<double>::infinity(), assemble_policy(uniform)};
    }

    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Unbounded) {
        std::vector<double> uniform(nv + 1, 0.0);
        for (std::size_t w = 0; w < states; ++w)
            for (std::size_t v = 0; v < nv; ++v)
                if (vars[v].first == w) uniform[v] = 1.0 / (double)atoms[w].size();
        return {std::numeric_limits<double>::infinity(), assemble_policy(uniform)};
    }
    if (sol.status != LpStatus::Optimal)
        throw NumericalFailure("pattern_lp: solver failed");
    return {-sol.objective, assemble_policy(sol.primal)};
}

namespace {

SupportPattern pattern_from_masks(const std::vector<std::uint32_t>& masks,
                                  std::size_t K) {
    SupportPattern s;
    for (std::size_t w = 0; w < masks.size(); ++w)
        for (std::size_t k = 0; k < K; ++k)
            if (masks[w] & (1u << k)) s.gamma.insert({w, k});
    return s;
}

}  // namespace

PatternSearchResult certified_radius_star(const GameInstance& inst,
                                          const RecommendationSet& X,
                                          const NormChoice& norm,
                                          std::uint64_t budget, Exec exec) {
    if (budget < 1)
        throw std::invalid_argument("certified_radius_star: budget must be >= 1");
    const std::size_t states = inst.state_count;
    const std::size_t K = X.size();
    if (K > 30)
        throw std::invalid_argument("certified_radius_star: too many profiles");

    const std::uint64_t per_state = (1ull << K) - 1;
    std::uint64_t total = 1;
    bool overflow = false;
    for (std::size_t w = 0; w < states && !overflow; ++w) {
        if (total > budget / per_state + 1) overflow = true;
        total *= per_state;
    }
    const bool complete = !overflow && total <= budget;

    // Enumerate pattern encodings: mixed-radix digits over states for the
    // complete sweep, otherwise singleton-per-state patterns plus the full
    // pattern as a documented lower-bound family.
    std::vector<std::vector<std::uint32_t>> candidates;
    if (complete) {
        candidates.reserve(total);
        for (std::uint64_t id = 0; id < total; ++id) {
            std::vector<std::uint32_t> masks(states);
            std::uint64_t rem = id;
            for (std::size_t w = 0; w < states; ++w) {
                masks[w] = (std::uint32_t)(rem % per_state) + 1;
                rem /= per_state;
            }
            candidates.push_back(std::move(masks));
        }
    } else {
        std::uint64_t singles = 1;
        bool s_overflow = false;
        for (std::size_t w = 0; w < states && !s_overflow; ++w) {
            if (singles > budget / K + 1) s_overflow = true;
            singles *= K;
        }
        const std::uint64_t n_single = s_overflow ? budget : std::min(singles, budget);
        for (std::uint64_t id = 0; id < n_single; ++id) {
            std::vector<std::uint32_t> masks(states);
            std::uint64_t rem = id;
            for (std::size_t w = 0; w < states; ++w) {
                masks[w] = 1u << (rem % K);
                rem /= K;
            }
            candidates.push_back(std::move(masks));
        }
        candidates.push_back(std::vector<std::uint32_t>(states, (std::uint32_t)per_state));
    }

    std::vector<double> values(candidates.size(),
                               -std::numeric_limits<double>::infinity());
    const std::int64_t n = (std::int64_t)candidates.size();
#ifdef _OPENMP
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < n; ++i)
            values[i] = pattern_lp(inst, X, pattern_from_masks(candidates[i], K), norm).rho;
    } else
#endif
    {
        (void)exec;
        for (std::int64_t i = 0; i < n; ++i)
            values[i] = pattern_lp(inst, X, pattern_from_masks(candidates[i], K), norm).rho;
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;  // ties keep the smallest encoding

    PatternSearchResult result{.rho_raw = values[best],
                               .rho = std::max(0.0, values[best]),
                               .best_pattern = pattern_from_masks(candidates[best], K),
                               .best_policy = SignalingPolicy(
                                   std::vector<std::vector<double>>(states,
                                       std::vector<double>(K, 1.0 / (double)K))),
                               .complete = complete,
                               .patterns_evaluated = (std::uint64_t)candidates.size()};
    result.best_policy = pattern_lp(inst, X, result.best_pattern, norm).policy;
    return result;
}

double population_check(const GameInstance& inst, const RecommendationSet& X,
                        const SignalingPolicy& pi, double epsilon,
                        const NormChoice& norm, std::size_t n_agents,
                        std::uint64_t seed) {
    const auto pairs = deviation_pairs(inst.edge_count);
    std::vector<std::vector<double>> dvecs;
    for (const DeviationPair& pair : pairs)
        dvecs.push_back(deviation_vector(inst, X, pi, pair));

    SplitMixRng rng(seed);
    const std::size_t n = inst.state_count;
    std::size_t obedient = 0;
    for (std::size_t agent = 0; agent < n_agents; ++agent) {
        std::vector<double> mu = inst.prior;
        if (epsilon > 0.0) {
            for (int attempt = 0; attempt < 1000; ++attempt) {
                std::vector<double> dir(n);
                for (double& v : dir) v = 2.0 * rng.uniform() - 1.0;
                if (norm_p(dir, norm.p == 3 ? 3 : norm.p) > 1.0) continue;
                const double radius = rng.uniform();
                std::vector<double> raw(n);
                for (std::size_t i = 0; i < n; ++i)
                    raw[i] = inst.prior[i] + epsilon * radius * dir[i];
                std::vector<double> proj = project_simplex(raw);
                std::vector<double> diff(n);
                for (std::size_t i = 0; i < n; ++i) diff[i] = proj[i] - inst.prior[i];
                if (norm_p(diff, norm.p == 3 ? 3 : norm.p) <= epsilon + 1e-12) {
                    mu = std::move(proj);
                    break;
                }
            }
        }
        bool ok = true;
        for (const auto& d : dvecs)
            if (dot(mu, d) < -kFeasTol) ok = false;
        if (ok) ++obedient;
    }
    return n_agents == 0 ? 1.0 : (double)obedient / (double)n_agents;
}

}  // namespace obed
