#include "obed/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace obed {

namespace {

// A nonzero kernel vector of the r x n matrix (n > rank), by Gaussian
// elimination with partial pivoting over columns of active atoms.
std::vector<double> kernel_vector(std::vector<std::vector<double>> m) {
    const std::size_t rows = m.size();
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    std::vector<std::size_t> pivot_col;
    std::vector<bool> is_pivot(cols, false);

    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < rows; ++c) {
        std::size_t best = row;
        for (std::size_t i = row + 1; i < rows; ++i)
            if (std::abs(m[i][c]) > std::abs(m[best][c])) best = i;
        if (std::abs(m[best][c]) < 1e-12) continue;
        std::swap(m[row], m[best]);
        const double p = m[row][c];
        for (std::size_t j = c; j < cols; ++j) m[row][j] /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == row || m[i][c] == 0.0) continue;
            const double f = m[i][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[row][j];
        }
        pivot_col.push_back(c);
        is_pivot[c] = true;
        ++row;
    }

    std::size_t free_col = cols;
    for (std::size_t c = 0; c < cols; ++c)
        if (!is_pivot[c]) {
            free_col = c;
            break;
        }
    if (free_col == cols)
        throw NumericalFailure("kernel_vector: matrix has full column rank");

    std::vector<double> z(cols, 0.0);
    z[free_col] = 1.0;
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
        z[pivot_col[i]] = -m[i][free_col];
    return z;
}

}  // namespace

void reduce_weights_inplace(const std::vector<std::vector<double>>& moments,
                            std::vector<double>& weights,
                            std::size_t target_support) {
    const std::size_t n = weights.size();
    if (moments.size() != n)
        throw std::invalid_argument("reduce_weights_inplace: size mismatch");
    const std::size_t dim = n == 0 ? 0 : moments[0].size();

    for (;;) {
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < n; ++j)
            if (weights[j] > 0.0) active.push_back(j);
        if (active.size() <= target_support) return;

        // Stacked moment matrix with an all-ones mass row; its kernel
        // directions preserve every moment and the total mass.
        std::vector<std::vector<double>> mat(dim + 1,
                                             std::vector<double>(active.size(), 0.0));
        for (std::size_t c = 0; c < active.size(); ++c) {
            for (std::size_t r = 0; r < dim; ++r) mat[r][c] = moments[active[c]][r];
            mat[dim][c] = 1.0;
        }
        std::vector<double> z = kernel_vector(std::move(mat));

        bool has_positive = false;
        for (double v : z)
            if (v > 0.0) has_positive = true;
        if (!has_positive)
            for (double& v : z) v = -v;

        std::size_t argmin = active.size();
        double t = 0.0;
        for (std::size_t c = 0; c < active.size(); ++c) {
            if (z[c] <= 0.0) continue;
            const double ratio = weights[active[c]] / z[c];
            if (argmin == active.size() || ratio < t) {
                argmin = c;
                t = ratio;
            }
        }
        if (argmin == active.size())
            throw NumericalFailure("reduce_weights_inplace: no positive kernel entry");

        for (std::size_t c = 0; c < active.size(); ++c)
            weights[active[c]] -= t * z[c];
        weights[active[argmin]] = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (weights[j] < 1e-15) weights[j] = 0.0;
    }
}

ReductionResult caratheodory_reduce(const GameInstance& inst,
                                    const RecommendationSet& X,
                                    const SignalingPolicy& pi) {
    const auto pairs = deviation_pairs(inst.edge_count);
    const std::size_t target = pairs.size() + 2;
    const std::size_t states = inst.state_count;
    const std::size_t K = X.size();

    std::vector<std::vector<double>> reduced(states);
    std::vector<bool> survives(K, false);
    for (std::size_t w = 0; w < states; ++w) {
        std::vector<std::vector<double>> moments(K);
        for (std::size_t k = 0; k < K; ++k) {
            moments[k].push_back(social_cost_profile(inst, w, X[k]));
            for (const DeviationPair& pair : pairs)
                moments[k].push_back(X[k][pair.r] *
                                     delta(inst, pair.r, pair.a, w, X[k]));
        }
        reduced[w] = pi.weights[w];
        reduce_weights_inplace(moments, reduced[w], target);
        for (std::size_t k = 0; k < K; ++k)
            if (reduced[w][k] > 0.0) survives[k] = true;
    }

    std::vector<std::size_t> atom_index;
    std::vector<std::vector<double>> profiles;
    for (std::size_t k = 0; k < K; ++k) {
        if (!survives[k]) continue;
        atom_index.push_back(k);
        profiles.push_back(X[k]);
    }

    std::vector<std::vector<double>> weights(states,
                                             std::vector<double>(atom_index.size(), 0.0));
    for (std::size_t w = 0; w < states; ++w) {
        double sum = 0.0;
        for (std::size_t j = 0; j < atom_index.size(); ++j) {
            weights[w][j] = reduced[w][atom_index[j]];
            sum += weights[w][j];
        }
        for (double& x : weights[w]) x /= sum;  // absorb rounding in the mass
    }

    return {SignalingPolicy(std::move(weights)), RecommendationSet(std::move(profiles)),
            std::move(atom_index)};
}

}  // namespace obed
