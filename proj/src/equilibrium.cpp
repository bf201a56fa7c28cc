#include "obed/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace obed {

FlowProfile::FlowProfile(std::vector<double> flow_in) : flow(std::move(flow_in)) {
    double sum = 0.0;
    for (double f : flow) {
        if (f < 0.0) throw std::invalid_argument("FlowProfile: negative entry");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw std::invalid_argument("FlowProfile: entries do not sum to 1");
}

FlowProfile nash_flow(const GameInstance& inst, std::size_t omega) {
    if (omega >= inst.state_count)
        throw std::invalid_argument("nash_flow: state index out of range");
    const std::size_t n = inst.edge_count;
    const double inf = std::numeric_limits<double>::infinity();

    // Positive-slope edges sorted by intercept; zero-slope edges tracked by
    // their minimal intercept (they absorb residual demand at that level).
    std::vector<std::size_t> pos;
    double b_zero_min = inf;
    std::size_t zero_edge = n;
    for (std::size_t e = 0; e < n; ++e) {
        if (inst.slope[e][omega] > 0.0) {
            pos.push_back(e);
        } else if (inst.intercept[e][omega] < b_zero_min) {
            b_zero_min = inst.intercept[e][omega];
            zero_edge = e;
        }
    }
    std::sort(pos.begin(), pos.end(), [&](std::size_t i, std::size_t j) {
        const double bi = inst.intercept[i][omega], bj = inst.intercept[j][omega];
        return bi != bj ? bi < bj : i < j;
    });

    // Water-fill the positive-slope edges: for each prefix, solve
    // sum (lambda - b_e)/a_e = 1 in closed form and accept the first level
    // consistent with the prefix.
    double lambda_pos = inf;
    std::size_t active = 0;
    if (!pos.empty()) {
        double inv_sum = 0.0, ratio_sum = 0.0;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const std::size_t e = pos[i];
            inv_sum += 1.0 / inst.slope[e][omega];
            ratio_sum += inst.intercept[e][omega] / inst.slope[e][omega];
            const double lambda = (1.0 + ratio_sum) / inv_sum;
            const double next_b =
                (i + 1 < pos.size()) ? inst.intercept[pos[i + 1]][omega] : inf;
            if (lambda <= next_b + 1e-15) {
                lambda_pos = lambda;
                active = i + 1;
                break;
            }
        }
    }

    std::vector<double> f(n, 0.0);
    if (lambda_pos <= b_zero_min) {
        for (std::size_t i = 0; i < active; ++i) {
            const std::size_t e = pos[i];
            f[e] = std::max(0.0, (lambda_pos - inst.intercept[e][omega]) / inst.slope[e][omega]);
        }
    } else {
        // The cheapest constant edge caps the level; positive-slope edges fill
        // up to b_zero_min and the residual rides the constant edge.
        double placed = 0.0;
        for (std::size_t e : pos) {
            if (inst.intercept[e][omega] < b_zero_min) {
                f[e] = (b_zero_min - inst.intercept[e][omega]) / inst.slope[e][omega];
                placed += f[e];
            }
        }
        f[zero_edge] = std::max(0.0, 1.0 - placed);
    }

    // Renormalize away accumulated rounding.
    double total = std::accumulate(f.begin(), f.end(), 0.0);
    if (total > 0.0)
        for (double& fe : f) fe /= total;
    return FlowProfile(std::move(f));
}

NashCheck verify_nash(const GameInstance& inst, std::size_t omega,
                      const FlowProfile& f, double tol) {
    NashCheck check;
    check.ok = true;
    const std::size_t n = inst.edge_count;
    for (std::size_t e = 0; e < n; ++e) {
        if (f.flow[e] <= tol) continue;
        const double le = latency(inst, omega, e, f.flow[e]);
        for (std::size_t e2 = 0; e2 < n; ++e2) {
            const double violation = le - latency(inst, omega, e2, f.flow[e2]);
            if (violation > tol) check.ok = false;
            check.worst_violation = std::max(check.worst_violation, violation);
        }
    }
    return check;
}

SignalingPolicy nash_policy(const GameInstance& inst, const RecommendationSet& X) {
    std::vector<std::vector<double>> weights(inst.state_count,
                                             std::vector<double>(X.size(), 0.0));
    for (std::size_t w = 0; w < inst.state_count; ++w) {
        const FlowProfile ne = nash_flow(inst, w);
        std::size_t match = X.size();
        for (std::size_t k = 0; k < X.size(); ++k) {
            double dist = 0.0;
            for (std::size_t e = 0; e < inst.edge_count; ++e)
                dist = std::max(dist, std::abs(X[k][e] - ne.flow[e]));
            if (dist <= 1e-9) {
                match = k;
                break;
            }
        }
        if (match == X.size()) throw MissingNashProfile(w);
        weights[w][match] = 1.0;
    }
    return SignalingPolicy(std::move(weights));
}

}  // namespace obed
