#include "obed/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace obed {

namespace {

std::vector<double> project_tangent(std::vector<double> v, std::size_t states,
                                    std::size_t K) {
    for (std::size_t w = 0; w < states; ++w) {
        double mean = 0.0;
        for (std::size_t k = 0; k < K; ++k) mean += v[w * K + k];
        mean /= (double)K;
        for (std::size_t k = 0; k < K; ++k) v[w * K + k] -= mean;
    }
    return v;
}

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

SweepResult value_sweep(const GameInstance& inst, const RecommendationSet& X,
                        const std::vector<double>& eps_grid, const NormChoice& norm,
                        RobustnessMode mode, Exec exec) {
    if (eps_grid.empty() || eps_grid.front() != 0.0 ||
        !std::is_sorted(eps_grid.begin(), eps_grid.end()))
        throw std::invalid_argument("value_sweep: grid must be ascending from 0");

    SweepResult result;
    result.grid = eps_grid;
    result.reports.resize(eps_grid.size());
    const std::int64_t n = (std::int64_t)eps_grid.size();
#ifdef _OPENMP
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i)
            result.reports[i] = robust_design(inst, X, eps_grid[i], norm, mode);
    } else
#endif
    {
        (void)exec;
        for (std::int64_t i = 0; i < n; ++i)
            result.reports[i] = robust_design(inst, X, eps_grid[i], norm, mode);
    }
    for (std::size_t i = 0; i < result.reports.size(); ++i)
        if (result.reports[i].status == LpStatus::Optimal)
            result.frontier = eps_grid[i];
    return result;
}

std::vector<DeviationPair> active_set(const RobustSolveReport& report, double tol) {
    if (report.status != LpStatus::Optimal)
        throw NotOptimal("active_set: report is not Optimal");
    std::vector<DeviationPair> out;
    for (std::size_t i = 0; i < report.pairs.size(); ++i)
        if (!report.vacuous[i] && std::abs(report.slack[i]) <= tol)
            out.push_back(report.pairs[i]);
    return out;
}

std::vector<std::vector<double>> projected_jacobian(
    const GameInstance& inst, const RecommendationSet& X, const SignalingPolicy& pi,
    double epsilon, const std::vector<DeviationPair>& active, const NormChoice& norm) {
    if (active.empty())
        throw std::invalid_argument("projected_jacobian: empty active set");
    const std::size_t states = inst.state_count;
    const std::size_t K = X.size();
    const double q = norm.dual_exponent();
    constexpr double kink_tol = 1e-10;

    std::vector<std::vector<double>> rows;
    for (const DeviationPair& pair : active) {
        std::vector<std::vector<double>> coef(states, std::vector<double>(K, 0.0));
        for (std::size_t w = 0; w < states; ++w)
            for (std::size_t k = 0; k < K; ++k)
                coef[w][k] = X[k][pair.r] * delta(inst, pair.r, pair.a, w, X[k]);

        std::vector<double> row(states * K, 0.0);
        for (std::size_t w = 0; w < states; ++w)
            for (std::size_t k = 0; k < K; ++k)
                row[w * K + k] = inst.prior[w] * coef[w][k];

        if (epsilon > 0.0) {
            std::vector<double> d(states, 0.0);
            for (std::size_t w = 0; w < states; ++w)
                for (std::size_t k = 0; k < K; ++k)
                    d[w] += coef[w][k] * pi.weights[w][k];

            if (std::isinf(q)) {
                // dual norm l-inf: single argmax coordinate; ties are kinks.
                std::size_t wstar = 0;
                for (std::size_t w = 1; w < states; ++w)
                    if (std::abs(d[w]) > std::abs(d[wstar])) wstar = w;
                for (std::size_t w = 0; w < states; ++w)
                    if (w != wstar &&
                        std::abs(std::abs(d[w]) - std::abs(d[wstar])) < kink_tol)
                        throw NondifferentiablePoint(
                            "projected_jacobian: tied argmax in ||D||_inf");
                const double sgn = d[wstar] >= 0.0 ? 1.0 : -1.0;
                for (std::size_t k = 0; k < K; ++k)
                    row[wstar * K + k] -= epsilon * sgn * coef[wstar][k];
            } else if (q == 1.0) {
                // dual norm l1: sign vector; zero components are kinks.
                for (std::size_t w = 0; w < states; ++w) {
                    if (std::abs(d[w]) < kink_tol)
                        throw NondifferentiablePoint(
                            "projected_jacobian: zero component in ||D||_1");
                    const double sgn = d[w] >= 0.0 ? 1.0 : -1.0;
                    for (std::size_t k = 0; k < K; ++k)
                        row[w * K + k] -= epsilon * sgn * coef[w][k];
                }
            } else {
                const double nd = l2_norm(d);
                if (nd < kink_tol)
                    throw NondifferentiablePoint(
                        "projected_jacobian: ||D||_2 vanishes");
                for (std::size_t w = 0; w < states; ++w)
                    for (std::size_t k = 0; k < K; ++k)
                        row[w * K + k] -= epsilon * (d[w] / nd) * coef[w][k];
            }
        }
        rows.push_back(project_tangent(std::move(row), states, K));
    }
    return rows;
}

double min_singular_value(const std::vector<std::vector<double>>& g) {
    const std::size_t m = g.size();
    if (m == 0) return 0.0;
    const std::size_t n = g[0].size();
    // Gram matrix G G^T, then cyclic Jacobi.
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += g[i][k] * g[j][k];
            a[i][j] = a[j][i] = s;
        }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t r = p + 1; r < m; ++r) {
                if (std::abs(a[p][r]) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * a[p][r], a[p][p] - a[r][r]);
                const double c = std::cos(theta), s = std::sin(theta);
                for (std::size_t k = 0; k < m; ++k) {
                    const double akp = a[k][p], akr = a[k][r];
                    a[k][p] = c * akp + s * akr;
                    a[k][r] = -s * akp + c * akr;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double apk = a[p][k], ark = a[r][k];
                    a[p][k] = c * apk + s * ark;
                    a[r][k] = -s * apk + c * ark;
                }
            }
        }
    }
    double lambda_min = a[0][0];
    for (std::size_t i = 1; i < m; ++i) lambda_min = std::min(lambda_min, a[i][i]);
    return std::sqrt(std::max(0.0, lambda_min));
}

SlopeBoundReport slope_bound(const GameInstance& inst, const RecommendationSet& X,
                             const RobustSolveReport& report, const NormChoice& norm,
                             RobustnessMode mode, double fd_step) {
    if (report.status != LpStatus::Optimal || !report.policy)
        throw NotOptimal("slope_bound: report is not Optimal");
    if (report.active.empty())
        throw std::invalid_argument("slope_bound: empty active set");

    const std::size_t states = inst.state_count;
    const std::size_t K = X.size();
    SlopeBoundReport out;
    out.epsilon = report.epsilon;
    out.n_active = report.active.size();
    out.kappa_omega = norm.certificate_constant(states);

    for (const DeviationPair& pair : deviation_pairs(inst.edge_count))
        for (std::size_t w = 0; w < states; ++w)
            for (std::size_t k = 0; k < K; ++k)
                out.delta_max = std::max(
                    out.delta_max,
                    std::abs(X[k][pair.r] * delta(inst, pair.r, pair.a, w, X[k])));

    std::vector<double> cost_grad(states * K, 0.0);
    for (std::size_t w = 0; w < states; ++w)
        for (std::size_t k = 0; k < K; ++k)
            cost_grad[w * K + k] = inst.prior[w] * social_cost_profile(inst, w, X[k]);
    out.projected_cost_grad_norm = l2_norm(project_tangent(cost_grad, states, K));

    bool kink = false;
    try {
        const auto g = projected_jacobian(inst, X, *report.policy, report.epsilon,
                                          report.active, norm);
        out.sigma_min = min_singular_value(g);
    } catch (const NondifferentiablePoint&) {
        kink = true;
    }
    out.rank_deficient = !kink && out.sigma_min < 1e-10;
    if (!kink && out.sigma_min > 0.0)
        out.bound = out.kappa_omega * out.delta_max *
                    std::sqrt((double)out.n_active) * out.projected_cost_grad_norm /
                    out.sigma_min;
    else
        out.bound = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        if (report.vacuous[i]) continue;
        bool is_active = false;
        for (const DeviationPair& p : report.active)
            if (p == report.pairs[i]) is_active = true;
        if (!is_active) continue;
        const auto d = deviation_vector(inst, X, *report.policy, report.pairs[i]);
        out.envelope_estimate += report.lambda[i] * dual_norm(d, norm);
    }

    // Finite-difference slope of the value function, with active-set
    // comparison at eps +- step for kink detection.
    const double eps = report.epsilon;
    const double lo = std::max(0.0, eps - fd_step);
    const RobustSolveReport rm = robust_design(inst, X, lo, norm, mode);
    const RobustSolveReport rp = robust_design(inst, X, eps + fd_step, norm, mode);
    bool stable = rm.status == LpStatus::Optimal && rp.status == LpStatus::Optimal;
    if (stable) {
        stable = rm.active == report.active && rp.active == report.active;
        const double span = (eps + fd_step) - lo;
        out.fd_slope = (rp.value - rm.value) / span;
        // Richardson refinement when the one-sided slopes disagree.
        const double sp = (rp.value - report.value) / fd_step;
        const double sm = eps > 0.0 ? (report.value - rm.value) / (eps - lo) : sp;
        const double scale = std::max({std::abs(sp), std::abs(sm), 1e-12});
        if (std::abs(sp - sm) > 0.1 * scale) {
            const double h = fd_step / 2.0;
            const double lo2 = std::max(0.0, eps - h);
            const RobustSolveReport rm2 = robust_design(inst, X, lo2, norm, mode);
            const RobustSolveReport rp2 = robust_design(inst, X, eps + h, norm, mode);
            if (rm2.status == LpStatus::Optimal && rp2.status == LpStatus::Optimal) {
                const double s_half = (rp2.value - rm2.value) / ((eps + h) - lo2);
                out.fd_slope = (4.0 * s_half - out.fd_slope) / 3.0;
            }
        }
    }
    out.differentiable = !kink && stable;
    return out;
}

}  // namespace obed
