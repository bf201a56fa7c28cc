#include "obed/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "obed/design.hpp"
#include "obed/rng.hpp"

namespace obed {

namespace {

void ensure_dir(const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
}

// Coefficients (c0, c1, c2) of an affine function of (p1, p2) from its
// values at three corners of the unit square.
std::vector<double> affine_coeffs(const std::function<double(double, double)>& f) {
    const double c0 = f(0.0, 0.0);
    return {c0, f(1.0, 0.0) - c0, f(0.0, 1.0) - c0};
}

double slack_at(const InstanceData& data, const DeviationPair& pair, double p1,
                double p2) {
    return obedience_slack(data.inst, data.profiles, policy_from_p(p1, p2),
                           data.inst.prior, pair);
}

double dev_entry_at(const InstanceData& data, const DeviationPair& pair,
                    std::size_t w, double p1, double p2) {
    return deviation_vector(data.inst, data.profiles, policy_from_p(p1, p2),
                            pair)[w];
}

// Segment of the line c0 + c1 x + c2 y = 0 inside the unit square.
std::vector<std::vector<double>> line_in_square(double c0, double c1, double c2) {
    std::vector<std::vector<double>> pts;
    auto push = [&](double x, double y) {
        if (x < -1e-9 || x > 1.0 + 1e-9 || y < -1e-9 || y > 1.0 + 1e-9) return;
        for (const auto& p : pts)
            if (std::abs(p[0] - x) < 1e-9 && std::abs(p[1] - y) < 1e-9) return;
        pts.push_back({x, y});
    };
    if (std::abs(c2) > 1e-12) {
        push(0.0, -c0 / c2);
        push(1.0, -(c0 + c1) / c2);
    }
    if (std::abs(c1) > 1e-12) {
        push(-c0 / c1, 0.0);
        push(-(c0 + c2) / c1, 1.0);
    }
    return pts;
}

double quantile(const std::vector<double>& sorted, double t) {
    if (sorted.empty()) return 0.0;
    const double pos = t * (double)(sorted.size() - 1);
    const std::size_t lo = (std::size_t)pos;
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - (double)lo;
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

InstanceData build_geometric_instance() {
    GameInstance inst(3, 2, {0.5, 0.5},
                      {{0.28, 0.74}, {0.72, 0.27}, {0.46, 0.44}},
                      {{0.50, 1.26}, {1.28, 0.52}, {0.94, 0.96}});
    RecommendationSet X({{0.55, 0.25, 0.20}, {0.25, 0.55, 0.20}});
    return {std::move(inst), std::move(X)};
}

SignalingPolicy policy_from_p(double p1, double p2) {
    return SignalingPolicy({{p1, 1.0 - p1}, {p2, 1.0 - p2}});
}

std::vector<std::vector<double>> conservative_halfplanes(const InstanceData& data,
                                                         double eps) {
    std::vector<std::vector<double>> rows;
    for (const DeviationPair& pair : deviation_pairs(data.inst.edge_count)) {
        if (eps == 0.0) {
            rows.push_back(affine_coeffs(
                [&](double p1, double p2) { return slack_at(data, pair, p1, p2); }));
            continue;
        }
        // A - eps * |d^w| >= 0 for every state, split into two affine rows.
        for (std::size_t w = 0; w < data.inst.state_count; ++w) {
            for (const double sign : {1.0, -1.0}) {
                rows.push_back(affine_coeffs([&](double p1, double p2) {
                    return slack_at(data, pair, p1, p2) +
                           sign * eps * dev_entry_at(data, pair, w, p1, p2);
                }));
            }
        }
    }
    return rows;
}

std::vector<std::vector<double>> clip_polygon(std::vector<std::vector<double>> poly,
                                              double c0, double c1, double c2) {
    auto value = [&](const std::vector<double>& p) {
        return c0 + c1 * p[0] + c2 * p[1];
    };
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& cur = poly[i];
        const auto& nxt = poly[(i + 1) % poly.size()];
        const double vc = value(cur), vn = value(nxt);
        if (vc >= -1e-12) out.push_back(cur);
        if ((vc > 1e-12 && vn < -1e-12) || (vc < -1e-12 && vn > 1e-12)) {
            const double t = vc / (vc - vn);
            out.push_back({cur[0] + t * (nxt[0] - cur[0]),
                           cur[1] + t * (nxt[1] - cur[1])});
        }
    }
    return out;
}

GeometricReport geometric_experiment(const std::vector<double>& eps_list,
                                     const std::string& out_dir) {
    const InstanceData data = build_geometric_instance();
    const NormChoice norm = NormChoice::l1();
    GeometricReport report;
    report.eps_list = eps_list;

    for (const DeviationPair& pair : deviation_pairs(data.inst.edge_count)) {
        const auto c = affine_coeffs(
            [&](double p1, double p2) { return slack_at(data, pair, p1, p2); });
        report.boundaries.push_back({pair, c[0], c[1], c[2]});
    }

    const std::vector<std::vector<double>> square = {
        {0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    report.nominal_polygon = square;
    for (const auto& b : report.boundaries)
        report.nominal_polygon =
            clip_polygon(std::move(report.nominal_polygon), b.c0, b.c1, b.c2);

    const RobustSolveReport nominal = nominal_design(data.inst, data.profiles);
    if (nominal.status != LpStatus::Optimal)
        throw NumericalFailure("geometric_experiment: nominal problem infeasible");
    report.p_star0 = {nominal.policy->weights[0][0], nominal.policy->weights[1][0]};
    report.value0 = nominal.value;

    const SignalingPolicy policy0 = policy_from_p(report.p_star0[0], report.p_star0[1]);
    report.eps2 = certified_radius(data.inst, data.profiles, policy0, norm).rho_hat;
    report.exact_radius0 = robust_radius(data.inst, data.profiles, policy0, norm,
                                         RobustnessMode::Conservative);

    for (const double eps : eps_list) {
        auto poly = square;
        for (const auto& row : conservative_halfplanes(data, eps))
            poly = clip_polygon(std::move(poly), row[0], row[1], row[2]);
        report.region_nonempty.push_back(poly.size() >= 3);
        report.region_polygons.push_back(std::move(poly));
        report.p_star0_feasible.push_back(
            is_robust_obedient(data.inst, data.profiles, policy0, eps, norm,
                               RobustnessMode::Conservative)
                .obedient);
    }

    for (const double eps : eps_list) {
        if (eps <= report.exact_radius0) continue;
        const RobustSolveReport r = robust_design(data.inst, data.profiles, eps, norm,
                                                  RobustnessMode::Conservative);
        if (r.status != LpStatus::Optimal) continue;
        report.eps3 = eps;
        report.p_star_eps3 = {r.policy->weights[0][0], r.policy->weights[1][0]};
        break;
    }

    if (out_dir.empty()) return report;
    ensure_dir(out_dir);

    std::ostringstream csv;
    csv << "kind,pair_r,pair_a,epsilon,a,b,c\n";
    for (const auto& b : report.boundaries)
        csv << "boundary," << b.pair.r << ',' << b.pair.a << ",,"
            << format_double(b.c0) << ',' << format_double(b.c1) << ','
            << format_double(b.c2) << '\n';
    for (const auto& v : report.nominal_polygon)
        csv << "nominal_vertex,,,," << format_double(v[0]) << ','
            << format_double(v[1]) << ",\n";
    for (std::size_t i = 0; i < eps_list.size(); ++i)
        for (const auto& v : report.region_polygons[i])
            csv << "region_vertex,,," << format_double(eps_list[i]) << ','
                << format_double(v[0]) << ',' << format_double(v[1]) << ",\n";
    csv << "optimizer,,,0," << format_double(report.p_star0[0]) << ','
        << format_double(report.p_star0[1]) << ",\n";
    if (report.eps3 >= 0.0)
        csv << "optimizer,,," << format_double(report.eps3) << ','
            << format_double(report.p_star_eps3[0]) << ','
            << format_double(report.p_star_eps3[1]) << ",\n";
    std::ofstream(out_dir + "/geometric.csv") << csv.str();

    nlohmann::json j;
    j["p_star0"] = report.p_star0;
    j["value0"] = report.value0;
    j["eps2_certified"] = report.eps2;
    j["exact_radius0"] = report.exact_radius0;
    j["eps3"] = report.eps3;
    if (report.eps3 >= 0.0) j["p_star_eps3"] = report.p_star_eps3;
    j["eps_list"] = report.eps_list;
    j["region_nonempty"] = report.region_nonempty;
    j["p_star0_feasible"] = report.p_star0_feasible;
    std::ofstream(out_dir + "/geometric.json") << j.dump(2) << '\n';

    SvgCanvas svg(420, 420, -0.05, 1.05, -0.05, 1.05);
    svg.axes("p1", "p2");
    svg.polygon(report.nominal_polygon, "#9ecae1", "#3182bd", 0.6);
    for (std::size_t i = 0; i < eps_list.size(); ++i)
        svg.polygon(report.region_polygons[i], "#a1d99b", "#31a354", 0.45);
    for (const auto& b : report.boundaries)
        svg.polyline(line_in_square(b.c0, b.c1, b.c2), "#e6550d", 1.0);
    svg.circle(report.p_star0[0], report.p_star0[1], 4, "black");
    svg.text(report.p_star0[0] + 0.02, report.p_star0[1], "p*(0)");
    if (report.eps3 >= 0.0) {
        svg.circle(report.p_star_eps3[0], report.p_star_eps3[1], 4, "#756bb1");
        svg.text(report.p_star_eps3[0] + 0.02, report.p_star_eps3[1], "p*(eps3)");
    }
    svg.save(out_dir + "/geometric.svg");
    return report;
}

std::vector<double> default_eps_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.02 * i);
    return grid;
}

InstanceData generate_instance(std::uint64_t seed, const MonteCarloConfig& config) {
    const std::size_t n = 5;
    SplitMixRng rng(seed);
    std::vector<std::vector<double>> slope(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> intercept(n, std::vector<double>(n, 0.0));
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t w = 0; w < n; ++w) {
            const bool favored = (w == e);
            slope[e][w] =
                favored ? rng.uniform(config.favored_slope_lo, config.favored_slope_hi)
                        : rng.uniform(config.other_slope_lo, config.other_slope_hi);
            intercept[e][w] =
                favored ? rng.uniform(config.favored_intercept_lo,
                                      config.favored_intercept_hi)
                        : rng.uniform(config.other_intercept_lo,
                                      config.other_intercept_hi);
        }
    }
    GameInstance inst(n, n, std::vector<double>(n, 0.2), std::move(slope),
                      std::move(intercept));
    RecommendationSet X({{0.2, 0.2, 0.2, 0.2, 0.2},
                         {0.6, 0.1, 0.1, 0.1, 0.1},
                         {0.1, 0.6, 0.1, 0.1, 0.1},
                         {0.1, 0.1, 0.6, 0.1, 0.1},
                         {0.1, 0.1, 0.1, 0.6, 0.1},
                         {0.1, 0.1, 0.1, 0.1, 0.6}});
    return {std::move(inst), std::move(X)};
}

MonteCarloResult montecarlo_experiment(const MonteCarloConfig& config,
                                       const std::string& out_dir, Exec exec) {
    const std::vector<double> grid =
        config.eps_grid.empty() ? default_eps_grid() : config.eps_grid;
    const std::size_t n = config.n_instances;

    MonteCarloResult result;
    result.n_generated = n;

    std::vector<std::vector<TrajectoryPoint>> all(n);
    std::vector<char> feasible0(n, 0);

    auto run_one = [&](std::size_t i) {
        const std::uint64_t inst_seed = SplitMixRng(config.seed, i).next();
        const InstanceData data = generate_instance(inst_seed, config);
        std::vector<TrajectoryPoint> traj;
        double v0 = 0.0;
        for (const double eps : grid) {
            const RobustSolveReport r = robust_design(data.inst, data.profiles, eps,
                                                      config.norm, config.mode);
            TrajectoryPoint pt;
            pt.epsilon = eps;
            pt.feasible = r.status == LpStatus::Optimal;
            if (pt.feasible) {
                if (traj.empty()) v0 = r.value;
                pt.value = r.value;
                pt.excess_x1000 = (r.value - v0) * 1000.0;
            }
            traj.push_back(pt);
            if (!pt.feasible) break;
        }
        feasible0[i] = !traj.empty() && traj.front().feasible;
        all[i] = std::move(traj);
    };

    const std::int64_t count = (std::int64_t)n;
#ifdef _OPENMP
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < count; ++i) run_one((std::size_t)i);
    } else
#endif
    {
        (void)exec;
        for (std::int64_t i = 0; i < count; ++i) run_one((std::size_t)i);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!feasible0[i]) continue;
        result.retained.push_back(i);
        result.trajectories.push_back(std::move(all[i]));
    }

    for (std::size_t j = 0; j < grid.size(); ++j) {
        std::vector<double> vals;
        for (const auto& traj : result.trajectories)
            if (j < traj.size() && traj[j].feasible)
                vals.push_back(traj[j].excess_x1000);
        MonteCarloResult::Summary s;
        s.epsilon = grid[j];
        s.n_feasible = vals.size();
        if (!vals.empty()) {
            std::sort(vals.begin(), vals.end());
            for (double v : vals) s.mean += v;
            s.mean /= (double)vals.size();
            s.median = quantile(vals, 0.5);
            s.q1 = quantile(vals, 0.25);
            s.q3 = quantile(vals, 0.75);
        }
        result.summary.push_back(s);
    }

    if (out_dir.empty()) return result;
    ensure_dir(out_dir);

    std::ostringstream traj_csv;
    traj_csv << "instance_id,epsilon,status,value,excess_x1000\n";
    for (std::size_t t = 0; t < result.retained.size(); ++t) {
        for (const TrajectoryPoint& pt : result.trajectories[t]) {
            traj_csv << result.retained[t] << ',' << format_double(pt.epsilon) << ','
                     << (pt.feasible ? "optimal" : "infeasible") << ',';
            if (pt.feasible)
                traj_csv << format_double(pt.value) << ','
                         << format_double(pt.excess_x1000);
            else
                traj_csv << ',';
            traj_csv << '\n';
        }
    }
    std::ofstream(out_dir + "/trajectories.csv") << traj_csv.str();

    std::ostringstream sum_csv;
    sum_csv << "epsilon,n_feasible,mean,median,q1,q3\n";
    for (const auto& s : result.summary) {
        sum_csv << format_double(s.epsilon) << ',' << s.n_feasible << ',';
        if (s.n_feasible > 0)
            sum_csv << format_double(s.mean) << ',' << format_double(s.median) << ','
                    << format_double(s.q1) << ',' << format_double(s.q3);
        else
            sum_csv << ",,,";
        sum_csv << '\n';
    }
    std::ofstream(out_dir + "/summary.csv") << sum_csv.str();

    double y_max = 1.0;
    for (const auto& traj : result.trajectories)
        for (const auto& pt : traj)
            if (pt.feasible) y_max = std::max(y_max, pt.excess_x1000);
    SvgCanvas svg(560, 400, 0.0, grid.back(), 0.0, y_max * 1.05);
    svg.axes("epsilon", "excess x1000");
    for (const auto& traj : result.trajectories) {
        std::vector<std::vector<double>> pts;
        for (const auto& pt : traj)
            if (pt.feasible) pts.push_back({pt.epsilon, pt.excess_x1000});
        svg.polyline(pts, "#9ecae1", 0.8);
    }
    std::vector<std::vector<double>> mean_pts, med_pts;
    for (const auto& s : result.summary) {
        if (s.n_feasible == 0) continue;
        mean_pts.push_back({s.epsilon, s.mean});
        med_pts.push_back({s.epsilon, s.median});
    }
    svg.polyline(mean_pts, "#08519c", 2.0);
    svg.polyline(med_pts, "#e6550d", 1.5);
    svg.save(out_dir + "/excess.svg");
    return result;
}

}  // namespace obed
