#include "obed/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace obed {

namespace {

struct PairData {
    DeviationPair pair;
    // coef[w][k] = x^(k)_r * Delta_{r,a}(w, x^(k)); d^w(pi) = sum_k coef * pi.
    std::vector<std::vector<double>> coef;
    bool vacuous = true;
};

std::vector<PairData> pair_coefficients(const GameInstance& inst,
                                        const RecommendationSet& X) {
    std::vector<PairData> out;
    for (const DeviationPair& pair : deviation_pairs(inst.edge_count)) {
        PairData pd;
        pd.pair = pair;
        pd.coef.assign(inst.state_count, std::vector<double>(X.size(), 0.0));
        for (std::size_t w = 0; w < inst.state_count; ++w) {
            for (std::size_t k = 0; k < X.size(); ++k) {
                const double c = X[k][pair.r] * delta(inst, pair.r, pair.a, w, X[k]);
                pd.coef[w][k] = c;
                if (c != 0.0) pd.vacuous = false;
            }
        }
        out.push_back(std::move(pd));
    }
    return out;
}

}  // namespace

RobustSolveReport robust_design(const GameInstance& inst, const RecommendationSet& X,
                                double epsilon, const NormChoice& norm,
                                RobustnessMode mode) {
    if (epsilon < 0.0)
        throw std::invalid_argument("robust_design: negative epsilon");
    if (norm.p == 2 &&
        (mode == RobustnessMode::ExactSimplex || epsilon > 0.0))
        throw UnsupportedNorm("robust_design: l2 norm requires a cone program");

    const std::size_t states = inst.state_count;
    const std::size_t K = X.size();
    const std::size_t np = states * K;
    auto pvar = [K](std::size_t w, std::size_t k) { return w * K + k; };

    const std::vector<PairData> pdata = pair_coefficients(inst, X);

    LinearProgram lp;
    lp.objective.assign(np, 0.0);
    for (std::size_t w = 0; w < states; ++w)
        for (std::size_t k = 0; k < K; ++k)
            lp.objective[pvar(w, k)] = inst.prior[w] * social_cost_profile(inst, w, X[k]);
    lp.finalize_bounds();

    for (std::size_t w = 0; w < states; ++w) {
        LinearProgram::Row row{std::vector<double>(np, 0.0), Relation::Equal, 1.0};
        for (std::size_t k = 0; k < K; ++k) row.coeffs[pvar(w, k)] = 1.0;
        lp.rows.push_back(row);
    }

    auto new_row = [&](Relation rel, double rhs) {
        lp.rows.push_back({std::vector<double>(lp.objective.size(), 0.0), rel, rhs});
        return &lp.rows.back();
    };
    auto add_vars = [&](std::size_t count, double lower) {
        const std::size_t first = lp.objective.size();
        lp.objective.resize(first + count, 0.0);
        lp.lower.resize(first + count, lower);
        lp.upper.resize(first + count, kLpInf);
        for (auto& row : lp.rows) row.coeffs.resize(first + count, 0.0);
        return first;
    };
    auto set_a_coeffs = [&](LinearProgram::Row* row, const PairData& pd, double scale) {
        for (std::size_t w = 0; w < states; ++w)
            for (std::size_t k = 0; k < K; ++k)
                row->coeffs[pvar(w, k)] += scale * inst.prior[w] * pd.coef[w][k];
    };

    // Rows owned by each non-vacuous pair, for dual aggregation.
    std::vector<std::vector<std::size_t>> pair_rows(pdata.size());

    for (std::size_t pi_idx = 0; pi_idx < pdata.size(); ++pi_idx) {
        const PairData& pd = pdata[pi_idx];
        if (pd.vacuous) continue;
        auto own = [&] { pair_rows[pi_idx].push_back(lp.rows.size() - 1); };

        if (epsilon == 0.0) {
            set_a_coeffs(new_row(Relation::GreaterEqual, 0.0), pd, 1.0);
            own();
        } else if (mode == RobustnessMode::Conservative && norm.p == 1) {
            // A -+ eps * d^w >= 0 for every state (dual norm l-inf).
            for (std::size_t w = 0; w < states; ++w) {
                for (const double sign : {1.0, -1.0}) {
                    auto* row = new_row(Relation::GreaterEqual, 0.0);
                    set_a_coeffs(row, pd, 1.0);
                    for (std::size_t k = 0; k < K; ++k)
                        row->coeffs[pvar(w, k)] += sign * epsilon * pd.coef[w][k];
                    own();
                }
            }
        } else if (mode == RobustnessMode::Conservative) {
            // p = inf, dual norm l1: u_w >= |d^w|, A - eps * sum u >= 0.
            const std::size_t u0 = add_vars(states, 0.0);
            for (std::size_t w = 0; w < states; ++w) {
                for (const double sign : {1.0, -1.0}) {
                    auto* row = new_row(Relation::GreaterEqual, 0.0);
                    row->coeffs[u0 + w] = 1.0;
                    for (std::size_t k = 0; k < K; ++k)
                        row->coeffs[pvar(w, k)] = sign * pd.coef[w][k];
                    own();
                }
            }
            auto* row = new_row(Relation::GreaterEqual, 0.0);
            set_a_coeffs(row, pd, 1.0);
            for (std::size_t w = 0; w < states; ++w) row->coeffs[u0 + w] = -epsilon;
            own();
        } else if (norm.p == 1) {
            // ExactSimplex, l1 ball: LP dual of
            //   min <mu, D> s.t. mu >= 0, sum mu = 1, t >= |mu - mu0|, sum t <= eps
            // with multipliers alpha, beta, gamma >= 0, delta >= 0, nu free.
            const std::size_t alpha = add_vars(states, 0.0);
            const std::size_t beta = add_vars(states, 0.0);
            const std::size_t gamma = add_vars(states, 0.0);
            const std::size_t delta_v = add_vars(1, 0.0);
            const std::size_t nu = add_vars(1, -kLpInf);
            for (std::size_t w = 0; w < states; ++w) {
                // Stationarity in mu_w: alpha - beta + gamma + nu = d^w(pi).
                auto* row = new_row(Relation::Equal, 0.0);
                row->coeffs[alpha + w] = 1.0;
                row->coeffs[beta + w] = -1.0;
                row->coeffs[gamma + w] = 1.0;
                row->coeffs[nu] = 1.0;
                for (std::size_t k = 0; k < K; ++k)
                    row->coeffs[pvar(w, k)] = -pd.coef[w][k];
                own();
                // Stationarity in t_w: beta + gamma - delta = 0.
                auto* row2 = new_row(Relation::Equal, 0.0);
                row2->coeffs[beta + w] = 1.0;
                row2->coeffs[gamma + w] = 1.0;
                row2->coeffs[delta_v] = -1.0;
                own();
            }
            // Dual objective nonnegative: the inner minimum is >= 0.
            auto* row = new_row(Relation::GreaterEqual, 0.0);
            for (std::size_t w = 0; w < states; ++w) {
                row->coeffs[beta + w] = -inst.prior[w];
                row->coeffs[gamma + w] = inst.prior[w];
            }
            row->coeffs[delta_v] = -epsilon;
            row->coeffs[nu] = 1.0;
            own();
        } else {
            // ExactSimplex, l-inf ball: interval bounds on mu.
            const std::size_t beta = add_vars(states, 0.0);
            const std::size_t gamma = add_vars(states, 0.0);
            const std::size_t nu = add_vars(1, -kLpInf);
            for (std::size_t w = 0; w < states; ++w) {
                // beta - gamma + nu = d^w(pi)
                auto* row = new_row(Relation::Equal, 0.0);
                row->coeffs[beta + w] = 1.0;
                row->coeffs[gamma + w] = -1.0;
                row->coeffs[nu] = 1.0;
                for (std::size_t k = 0; k < K; ++k)
                    row->coeffs[pvar(w, k)] = -pd.coef[w][k];
                own();
            }
            auto* row = new_row(Relation::GreaterEqual, 0.0);
            for (std::size_t w = 0; w < states; ++w) {
                row->coeffs[beta + w] = std::max(0.0, inst.prior[w] - epsilon);
                row->coeffs[gamma + w] = -std::min(1.0, inst.prior[w] + epsilon);
            }
            row->coeffs[nu] = 1.0;
            own();
        }
    }

    RobustSolveReport report;
    report.epsilon = epsilon;
    for (const PairData& pd : pdata) {
        report.pairs.push_back(pd.pair);
        report.vacuous.push_back(pd.vacuous);
    }
    report.lambda.assign(pdata.size(), 0.0);
    report.slack.assign(pdata.size(), 0.0);

    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) {
        report.status = LpStatus::Infeasible;
        return report;
    }
    if (sol.status != LpStatus::Optimal)
        throw NumericalFailure("robust_design: unexpected unbounded LP");

    std::vector<std::vector<double>> weights(states, std::vector<double>(K, 0.0));
    for (std::size_t w = 0; w < states; ++w) {
        for (std::size_t k = 0; k < K; ++k)
            weights[w][k] = std::max(0.0, sol.primal[pvar(w, k)]);
        const double s = std::accumulate(weights[w].begin(), weights[w].end(), 0.0);
        for (double& x : weights[w]) x /= s;
    }
    report.status = LpStatus::Optimal;
    report.policy = SignalingPolicy(std::move(weights));
    report.value = sol.objective;

    for (std::size_t i = 0; i < pdata.size(); ++i) {
        if (pdata[i].vacuous) continue;
        double lam = 0.0;
        for (std::size_t r : pair_rows[i])
            if (lp.rows[r].rel != Relation::Equal) lam += sol.duals[r];
        report.lambda[i] = std::max(0.0, lam);
        report.slack[i] = worst_case_slack(inst, X, *report.policy, pdata[i].pair,
                                           epsilon, norm, mode)
                              .value;
        if (std::abs(report.slack[i]) <= kActiveTol)
            report.active.push_back(pdata[i].pair);
    }
    return report;
}

RobustSolveReport nominal_design(const GameInstance& inst, const RecommendationSet& X) {
    return robust_design(inst, X, 0.0, NormChoice::l1(), RobustnessMode::Conservative);
}

}  // namespace obed
