#include "obed/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace obed {

void LinearProgram::finalize_bounds() {
    lower.resize(num_vars(), 0.0);
    upper.resize(num_vars(), kLpInf);
}

namespace {

constexpr double kPivotTol = 1e-11;

// Equality standard form: A z = b, z >= 0, minimize cost^T z.
struct StandardForm {
    std::size_t m = 0;           // rows
    std::size_t n = 0;           // columns incl. slack and artificial
    std::size_t art_begin = 0;   // first artificial column
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    std::vector<double> cost;    // phase-2 costs; artificials cost 0
    std::vector<int> basis;      // initial basis, one column per row
    std::vector<bool> flipped;   // row negated during rhs normalization
    double objective_const = 0.0;

    // Mapping from structural columns back to user variables.
    // kind: 0 = shifted (x = lower + z), 1 = negated (x = upper - z),
    // 2 = free positive part, 3 = free negative part.
    struct VarMap {
        std::size_t user = 0;
        int kind = 0;
        double offset = 0.0;
    };
    std::vector<VarMap> var_map;
    std::size_t num_user_rows = 0;
};

StandardForm build_standard_form(const LinearProgram& lp_in) {
    LinearProgram lp = lp_in;
    lp.finalize_bounds();
    const std::size_t nv = lp.num_vars();
    for (const auto& row : lp.rows)
        if (row.coeffs.size() != nv)
            throw std::invalid_argument("solve_lp: row width mismatch");
    for (std::size_t j = 0; j < nv; ++j)
        if (lp.lower[j] > lp.upper[j])
            throw std::invalid_argument("solve_lp: lower bound exceeds upper bound");

    StandardForm sf;

    // Structural columns with bound transforms applied.
    struct Col {
        std::size_t user;
        int kind;
        double offset;
        double sign;  // applied to coefficients
        double extra_upper = kLpInf;  // finite residual upper bound, if any
    };
    std::vector<Col> cols;
    for (std::size_t j = 0; j < nv; ++j) {
        const double l = lp.lower[j], u = lp.upper[j];
        if (std::isfinite(l)) {
            Col c{j, 0, l, 1.0};
            if (std::isfinite(u)) c.extra_upper = u - l;
            cols.push_back(c);
        } else if (std::isfinite(u)) {
            cols.push_back({j, 1, u, -1.0});
        } else {
            cols.push_back({j, 2, 0.0, 1.0});
            cols.push_back({j, 3, 0.0, -1.0});
        }
    }
    const std::size_t ns = cols.size();

    // Canonical rows: user rows as >= or =, then residual upper bounds as
    // -z <= ... i.e. >= form.
    struct CanonRow {
        std::vector<double> coeffs;  // over structural columns
        bool equality;
        double rhs;
    };
    std::vector<CanonRow> canon;
    sf.num_user_rows = lp.rows.size();
    for (const auto& row : lp.rows) {
        CanonRow cr;
        cr.equality = (row.rel == Relation::Equal);
        const double sign = (row.rel == Relation::LessEqual) ? -1.0 : 1.0;
        cr.rhs = sign * row.rhs;
        cr.coeffs.assign(ns, 0.0);
        for (std::size_t c = 0; c < ns; ++c) {
            const double a = row.coeffs[cols[c].user];
            cr.coeffs[c] = sign * cols[c].sign * a;
            if (cols[c].kind == 0 || cols[c].kind == 1)
                cr.rhs -= sign * a * cols[c].offset;
        }
        canon.push_back(std::move(cr));
    }
    for (std::size_t c = 0; c < ns; ++c) {
        if (std::isfinite(cols[c].extra_upper)) {
            CanonRow cr;
            cr.equality = false;
            cr.coeffs.assign(ns, 0.0);
            cr.coeffs[c] = -1.0;
            cr.rhs = -cols[c].extra_upper;
            canon.push_back(std::move(cr));
        }
    }

    const std::size_t m = canon.size();
    const std::size_t nslack = m;  // one surplus column per inequality (unused for =)
    sf.m = m;
    sf.art_begin = ns + nslack;
    sf.A.assign(m, std::vector<double>());
    sf.b.assign(m, 0.0);
    sf.flipped.assign(m, false);
    sf.basis.assign(m, -1);

    // Costs over structural columns.
    std::vector<double> struct_cost(ns, 0.0);
    for (std::size_t c = 0; c < ns; ++c) {
        const double cj = lp.objective[cols[c].user];
        struct_cost[c] = cols[c].sign * cj;
        if (cols[c].kind == 0 || cols[c].kind == 1)
            sf.objective_const += cj * cols[c].offset;
        sf.var_map.push_back({cols[c].user, cols[c].kind, cols[c].offset});
    }

    // Assemble rows; decide slack sign after rhs normalization and count
    // needed artificials.
    std::vector<int> art_row;  // rows requiring an artificial
    std::vector<double> slack_sign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double sgn = 1.0;
        if (canon[i].rhs < 0.0) {
            sgn = -1.0;
            sf.flipped[i] = true;
        }
        sf.b[i] = sgn * canon[i].rhs;
        sf.A[i].assign(sf.art_begin, 0.0);
        for (std::size_t c = 0; c < ns; ++c) sf.A[i][c] = sgn * canon[i].coeffs[c];
        if (!canon[i].equality) {
            slack_sign[i] = -sgn;  // >= row carries a surplus -s before flip
            sf.A[i][ns + i] = slack_sign[i];
        }
        if (canon[i].equality || slack_sign[i] < 0.0) art_row.push_back((int)i);
    }

    const std::size_t nart = art_row.size();
    sf.n = sf.art_begin + nart;
    for (std::size_t i = 0; i < m; ++i) sf.A[i].resize(sf.n, 0.0);
    for (std::size_t t = 0; t < nart; ++t) {
        sf.A[art_row[t]][sf.art_begin + t] = 1.0;
        sf.basis[art_row[t]] = (int)(sf.art_begin + t);
    }
    for (std::size_t i = 0; i < m; ++i)
        if (sf.basis[i] < 0) sf.basis[i] = (int)(ns + i);  // positive slack

    sf.cost.assign(sf.n, 0.0);
    for (std::size_t c = 0; c < ns; ++c) sf.cost[c] = struct_cost[c];
    return sf;
}

struct Tableau {
    std::vector<std::vector<double>> rows;  // m x n
    std::vector<double> rhs;
    std::vector<double> cost_row;           // reduced costs for active phase
    std::vector<int> basis;

    void pivot(std::size_t l, std::size_t e) {
        const double p = rows[l][e];
        const std::size_t n = rows[l].size();
        for (std::size_t j = 0; j < n; ++j) rows[l][j] /= p;
        rhs[l] /= p;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == l) continue;
            const double f = rows[i][e];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) rows[i][j] -= f * rows[l][j];
            rows[i][e] = 0.0;
            rhs[i] -= f * rhs[l];
        }
        const double fc = cost_row[e];
        if (fc != 0.0) {
            for (std::size_t j = 0; j < n; ++j) cost_row[j] -= fc * rows[l][j];
            cost_row[e] = 0.0;
        }
        basis[l] = (int)e;
    }

    double objective(const std::vector<double>& c) const {
        double z = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) z += c[basis[i]] * rhs[i];
        return z;
    }
};

// Rebuilds the tableau from the original data for the current basis:
// rows = B^-1 A, rhs = B^-1 b, cost_row = c - c_B B^-1 A. Long degenerate
// pivot sequences otherwise accumulate enough drift to cycle numerically.
void refactorize(const StandardForm& sf, Tableau& tab,
                 const std::vector<double>& active_cost) {
    const std::size_t m = sf.m, n = sf.n;
    std::vector<std::vector<double>> M(m, std::vector<double>(m + n + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < m; ++k) M[i][k] = sf.A[i][tab.basis[k]];
        for (std::size_t j = 0; j < n; ++j) M[i][m + j] = sf.A[i][j];
        M[i][m + n] = sf.b[i];
    }
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < m; ++i)
            if (std::abs(M[i][c]) > std::abs(M[piv][c])) piv = i;
        if (std::abs(M[piv][c]) < 1e-12)
            throw NumericalFailure("singular basis in refactorization");
        std::swap(M[c], M[piv]);
        const double p = M[c][c];
        for (std::size_t k = c; k <= m + n; ++k) M[c][k] /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == c || M[i][c] == 0.0) continue;
            const double f = M[i][c];
            for (std::size_t k = c; k <= m + n; ++k) M[i][k] -= f * M[c][k];
        }
    }
    tab.rows.assign(m, std::vector<double>(n, 0.0));
    tab.rhs.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab.rows[i][j] = M[i][m + j];
        tab.rhs[i] = std::max(0.0, M[i][m + n]);
    }
    tab.cost_row = active_cost;
    for (std::size_t i = 0; i < m; ++i) {
        const double cb = active_cost[tab.basis[i]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) tab.cost_row[j] -= cb * tab.rows[i][j];
    }
}

// Dantzig pricing with a Bland fallback: after m consecutive degenerate
// pivots the entering rule drops to smallest-index until progress resumes,
// which keeps the method finite and deterministic. Returns false on
// unboundedness.
bool run_simplex(const StandardForm& sf, Tableau& tab,
                 const std::vector<double>& active_cost, std::size_t col_limit,
                 std::size_t max_iter) {
    const std::size_t m = tab.rows.size();
    std::size_t stalled = 0;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > max_iter)
            throw NumericalFailure("simplex iteration limit exceeded");
        if (iter % 256 == 255) refactorize(sf, tab, active_cost);
        const bool bland = stalled > m;
        std::size_t enter = col_limit;
        for (std::size_t j = 0; j < col_limit; ++j) {
            if (tab.cost_row[j] >= -kLpOptTol) continue;
            if (bland) {
                enter = j;
                break;
            }
            if (enter == col_limit || tab.cost_row[j] < tab.cost_row[enter])
                enter = j;
        }
        if (enter == col_limit) return true;

        // Two-pass ratio test. Pivots below 1e-8 are avoided unless nothing
        // larger exists; near-ties go to the smallest basic index under the
        // Bland fallback and to the largest pivot magnitude otherwise.
        double pivot_min = 1e-8;
        {
            bool usable = false;
            for (std::size_t i = 0; i < m && !usable; ++i)
                usable = tab.rows[i][enter] > pivot_min;
            if (!usable) pivot_min = kPivotTol;
        }
        double best_ratio = kLpInf;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = tab.rows[i][enter];
            if (a <= pivot_min) continue;
            best_ratio = std::min(best_ratio, tab.rhs[i] / a);
        }
        if (best_ratio == kLpInf) return false;
        const double tie = 1e-9 * (1.0 + std::abs(best_ratio));
        std::size_t leave = m;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = tab.rows[i][enter];
            if (a <= pivot_min || tab.rhs[i] / a > best_ratio + tie) continue;
            if (leave == m ||
                (bland ? tab.basis[i] < tab.basis[leave]
                       : a > tab.rows[leave][enter]))
                leave = i;
        }
        if (best_ratio <= 1e-12)
            ++stalled;
        else
            stalled = 0;
        tab.pivot(leave, enter);
    }
}

// Solve B^T y = c_B by Gaussian elimination on the pre-pivot columns.
std::vector<double> basis_duals(const StandardForm& sf, const std::vector<int>& basis) {
    const std::size_t m = sf.m;
    std::vector<std::vector<double>> M(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {       // row i of B^T = column basis[i] of A
        for (std::size_t k = 0; k < m; ++k) M[i][k] = sf.A[k][basis[i]];
        M[i][m] = sf.cost[basis[i]];
    }
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < m; ++i)
            if (std::abs(M[i][c]) > std::abs(M[piv][c])) piv = i;
        if (std::abs(M[piv][c]) < 1e-13) {
            M[piv][c] = 0.0;  // singular direction: treated as y component 0
            continue;
        }
        std::swap(M[c], M[piv]);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == c || M[i][c] == 0.0) continue;
            const double f = M[i][c] / M[c][c];
            for (std::size_t k = c; k <= m; ++k) M[i][k] -= f * M[c][k];
        }
    }
    std::vector<double> y(m, 0.0);
    for (std::size_t c = 0; c < m; ++c)
        if (std::abs(M[c][c]) >= 1e-13) y[c] = M[c][m] / M[c][c];
    return y;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    StandardForm sf = build_standard_form(lp);
    const std::size_t m = sf.m, n = sf.n;
    const std::size_t max_iter = 5000 + 60 * (m + n);

    Tableau tab;
    tab.rows = sf.A;
    tab.rhs = sf.b;
    tab.basis = sf.basis;

    LpSolution sol;

    // Phase 1: drive artificials to zero.
    if (sf.art_begin < n) {
        std::vector<double> phase1(n, 0.0);
        for (std::size_t j = sf.art_begin; j < n; ++j) phase1[j] = 1.0;
        refactorize(sf, tab, phase1);
        run_simplex(sf, tab, phase1, n, max_iter);
        if (tab.objective(phase1) > kLpFeasTol) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Pivot basic artificials out where a non-artificial pivot exists.
        for (std::size_t i = 0; i < m; ++i) {
            if ((std::size_t)tab.basis[i] < sf.art_begin) continue;
            for (std::size_t j = 0; j < sf.art_begin; ++j) {
                if (std::abs(tab.rows[i][j]) > 1e-9) {
                    const double saved = tab.cost_row[j];
                    tab.pivot(i, j);
                    (void)saved;
                    break;
                }
            }
        }
    }

    // Phase 2: artificial columns are barred from entering.
    refactorize(sf, tab, sf.cost);
    if (!run_simplex(sf, tab, sf.cost, sf.art_begin, max_iter)) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    // Primal in standard-form space.
    std::vector<double> z(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (tab.rhs[i] != 0.0) z[tab.basis[i]] = tab.rhs[i];

    sol.primal.assign(lp.objective.size(), 0.0);
    for (std::size_t c = 0; c < sf.var_map.size(); ++c) {
        const auto& vm = sf.var_map[c];
        switch (vm.kind) {
            case 0: sol.primal[vm.user] += vm.offset + z[c]; break;
            case 1: sol.primal[vm.user] += vm.offset - z[c]; break;
            case 2: sol.primal[vm.user] += z[c]; break;
            case 3: sol.primal[vm.user] -= z[c]; break;
        }
    }

    sol.objective = tab.objective(sf.cost) + sf.objective_const;

    // Duals for the canonical (>=) rows; unflip rhs-normalization signs.
    std::vector<double> y = basis_duals(sf, tab.basis);
    sol.duals.assign(sf.num_user_rows, 0.0);
    double dual_obj = sf.objective_const;
    for (std::size_t i = 0; i < m; ++i) {
        const double yc = sf.flipped[i] ? -y[i] : y[i];
        const double bc = sf.flipped[i] ? -sf.b[i] : sf.b[i];
        if (i < sf.num_user_rows) sol.duals[i] = yc;
        dual_obj += yc * bc;
    }
    sol.dual_objective = dual_obj;
    sol.status = LpStatus::Optimal;
    return sol;
}

}  // namespace obed
