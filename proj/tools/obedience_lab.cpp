// Command-line front end: solve | radius | certify | sweep | nash | reduce |
// experiment-geometric | experiment-montecarlo.
// Exit codes: 0 success, 2 infeasible at the requested epsilon, 3 input error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "obed/design.hpp"
#include "obed/equilibrium.hpp"
#include "obed/experiments.hpp"
#include "obed/io.hpp"
#include "obed/reduction.hpp"
#include "obed/rng.hpp"
#include "obed/sensitivity.hpp"

namespace {

using namespace obed;
using nlohmann::json;

NormChoice parse_norm(const std::string& s) {
    if (s == "l1") return NormChoice::l1();
    if (s == "l2") return NormChoice::l2();
    if (s == "linf") return NormChoice::linf();
    throw CLI::ValidationError("--norm", "expected l1, linf, or l2");
}

RobustnessMode parse_mode(const std::string& s) {
    if (s == "conservative") return RobustnessMode::Conservative;
    if (s == "exact") return RobustnessMode::ExactSimplex;
    throw CLI::ValidationError("--mode", "expected conservative or exact");
}

void write_json(const std::string& path, const json& j) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

int run_solve(const std::string& instance_path, const std::string& out_dir,
              double epsilon, const NormChoice& norm, RobustnessMode mode) {
    const InstanceData data = load_instance(instance_path);
    const RobustSolveReport report =
        robust_design(data.inst, data.profiles, epsilon, norm, mode);
    std::filesystem::create_directories(out_dir);
    write_solve_report(out_dir + "/report.json", report);
    write_slack_csv(out_dir + "/slacks.csv", report);
    if (report.status != LpStatus::Optimal) {
        std::cerr << "infeasible at epsilon " << epsilon << '\n';
        return 2;
    }
    std::cout << "value " << report.value << '\n';
    return 0;
}

int run_radius(const std::string& instance_path, const std::string& policy_path,
               const std::string& out_dir, const NormChoice& norm) {
    const InstanceData data = load_instance(instance_path);
    const SignalingPolicy pi = load_policy(policy_path);
    const CertificateReport cert = certified_radius(data.inst, data.profiles, pi, norm);
    const double conservative = robust_radius(data.inst, data.profiles, pi, norm,
                                              RobustnessMode::Conservative);
    double exact = std::numeric_limits<double>::quiet_NaN();
    if (norm.p != 2)
        exact = robust_radius(data.inst, data.profiles, pi, norm,
                              RobustnessMode::ExactSimplex);

    std::filesystem::create_directories(out_dir);
    write_certificate_csv(out_dir + "/certificate.csv", cert);
    auto radius_field = [](double v) {
        return std::isinf(v) ? json("inf") : json(v);
    };
    json j;
    j["certified_radius"] = cert.rho_hat;
    j["vacuous"] = cert.vacuous;
    j["conservative_radius"] = radius_field(conservative);
    if (!std::isnan(exact)) j["exact_radius"] = radius_field(exact);
    write_json(out_dir + "/radius.json", j);
    std::cout << "certified " << cert.rho_hat << " conservative " << conservative
              << '\n';
    return 0;
}

int run_certify(const std::string& instance_path, const std::string& out_dir,
                const NormChoice& norm, std::uint64_t budget) {
    const InstanceData data = load_instance(instance_path);
    const PatternSearchResult res =
        certified_radius_star(data.inst, data.profiles, norm, budget);
    const CertificateReport cert =
        certified_radius(data.inst, data.profiles, res.best_policy, norm);

    std::filesystem::create_directories(out_dir);
    write_certificate_csv(out_dir + "/certificate.csv", cert);
    save_policy(out_dir + "/best_policy.json", res.best_policy);
    json j;
    j["rho_hat_star"] = res.rho;
    j["rho_raw"] = res.rho_raw;
    j["complete"] = res.complete;
    j["patterns_evaluated"] = res.patterns_evaluated;
    write_json(out_dir + "/certify.json", j);
    std::cout << "rho_hat_star " << res.rho << (res.complete ? "" : " (heuristic)")
              << '\n';
    return 0;
}

int run_sweep(const std::string& instance_path, const std::string& out_dir,
              const std::vector<double>& grid, const NormChoice& norm,
              RobustnessMode mode) {
    const InstanceData data = load_instance(instance_path);
    const SweepResult sweep = value_sweep(data.inst, data.profiles, grid, norm, mode);
    std::vector<SweepCsvRow> rows;
    for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
        const RobustSolveReport& r = sweep.reports[i];
        SweepCsvRow row;
        row.epsilon = sweep.grid[i];
        row.feasible = r.status == LpStatus::Optimal;
        if (row.feasible) {
            row.value = r.value;
            row.n_active = r.active.size();
            if (!r.active.empty()) {
                try {
                    const SlopeBoundReport sb =
                        slope_bound(data.inst, data.profiles, r, norm, mode);
                    row.has_bound = !sb.rank_deficient && std::isfinite(sb.bound);
                    row.bound = sb.bound;
                    row.fd_slope = sb.fd_slope;
                    row.differentiable = sb.differentiable;
                } catch (const NumericalFailure&) {
                }
            }
        }
        rows.push_back(row);
    }
    std::filesystem::create_directories(out_dir);
    write_sweep_csv(out_dir + "/sweep.csv", rows);
    if (sweep.frontier)
        std::cout << "frontier " << *sweep.frontier << '\n';
    else
        std::cout << "no feasible grid point\n";
    return 0;
}

int run_nash(const std::string& instance_path, const std::string& out_dir) {
    const InstanceData data = load_instance(instance_path);
    json j;
    json flows = json::array();
    for (std::size_t w = 0; w < data.inst.state_count; ++w) {
        const FlowProfile f = nash_flow(data.inst, w);
        const NashCheck check = verify_nash(data.inst, w, f, 1e-8);
        json row;
        row["state"] = w;
        row["flow"] = f.flow;
        row["verified"] = check.ok;
        flows.push_back(row);
    }
    j["flows"] = flows;
    try {
        const SignalingPolicy pi = nash_policy(data.inst, data.profiles);
        j["nash_policy"] = pi.weights;
    } catch (const MissingNashProfile& e) {
        j["missing_nash_profile_state"] = e.state;
    }
    write_json(out_dir + "/nash.json", j);
    return 0;
}

int run_reduce(const std::string& instance_path, const std::string& policy_path,
               const std::string& out_dir, std::uint64_t seed) {
    const InstanceData data = load_instance(instance_path);
    const SignalingPolicy pi = load_policy(policy_path);
    const ReductionResult res = caratheodory_reduce(data.inst, data.profiles, pi);

    // Verification: cost and every pair slack preserved at random beliefs.
    double worst = std::abs(expected_cost(data.inst, data.profiles, pi) -
                            expected_cost(data.inst, res.profiles, res.policy));
    SplitMixRng rng(seed);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> mu(data.inst.state_count);
        double sum = 0.0;
        for (double& m : mu) sum += (m = -std::log(1.0 - rng.uniform()));
        for (double& m : mu) m /= sum;
        for (const DeviationPair& pair : deviation_pairs(data.inst.edge_count))
            worst = std::max(
                worst, std::abs(obedience_slack(data.inst, data.profiles, pi, mu, pair) -
                                obedience_slack(data.inst, res.profiles, res.policy,
                                                mu, pair)));
    }

    std::filesystem::create_directories(out_dir);
    save_policy(out_dir + "/reduced_policy.json", res.policy);
    save_instance(out_dir + "/reduced_instance.json", data.inst, res.profiles);
    json j;
    j["atom_index"] = res.atom_index;
    j["max_moment_error"] = worst;
    std::size_t max_support = 0;
    for (const auto& row : res.policy.weights) {
        std::size_t s = 0;
        for (double wgt : row)
            if (wgt > 0.0) ++s;
        max_support = std::max(max_support, s);
    }
    j["max_state_support"] = max_support;
    write_json(out_dir + "/reduction.json", j);
    std::cout << "atoms " << res.profiles.size() << " max_error " << worst << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust information design for Bayesian congestion games"};
    app.require_subcommand(1);

    std::string instance_path, policy_path, out_dir = "out";
    std::string norm_str = "l1", mode_str = "conservative";
    double epsilon = 0.0;
    std::vector<double> grid;
    std::uint64_t seed = 1, budget = 100000;
    std::size_t n_instances = 100;
    bool serial = false;

    auto add_common = [&](CLI::App* cmd, bool needs_instance) {
        auto* opt = cmd->add_option("--instance", instance_path, "instance JSON file");
        if (needs_instance) opt->required();
        cmd->add_option("--out-dir", out_dir, "output directory");
        cmd->add_option("--norm", norm_str, "belief norm: l1, linf, l2");
        cmd->add_option("--mode", mode_str, "robustness mode: conservative, exact");
    };

    auto* solve = app.add_subcommand("solve", "solve the (robust) design problem");
    add_common(solve, true);
    solve->add_option("--epsilon", epsilon, "robustness radius");

    auto* radius = app.add_subcommand("radius", "radii of a given policy");
    add_common(radius, true);
    radius->add_option("--policy", policy_path, "policy JSON file")->required();

    auto* certify = app.add_subcommand("certify", "pattern search for rho_hat_star");
    add_common(certify, true);
    certify->add_option("--budget", budget, "max patterns to enumerate");

    auto* sweep = app.add_subcommand("sweep", "value sweep over epsilon");
    add_common(sweep, true);
    sweep->add_option("--epsilon-grid", grid, "ascending grid starting at 0");

    auto* nash = app.add_subcommand("nash", "statewise Nash flows and policy");
    add_common(nash, true);

    auto* reduce = app.add_subcommand("reduce", "finite-support reduction");
    add_common(reduce, true);
    reduce->add_option("--policy", policy_path, "policy JSON file")->required();
    reduce->add_option("--seed", seed, "verification belief seed");

    auto* geo = app.add_subcommand("experiment-geometric", "three-edge example");
    add_common(geo, false);
    geo->add_option("--epsilon-grid", grid, "ascending grid starting at 0");

    auto* mc = app.add_subcommand("experiment-montecarlo", "excess robust cost study");
    add_common(mc, false);
    mc->add_option("--epsilon-grid", grid, "ascending grid starting at 0");
    mc->add_option("--seed", seed, "master seed");
    mc->add_option("--n-instances", n_instances, "number of generated instances");
    mc->add_flag("--serial", serial, "disable parallel instance processing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 3;
    }

    try {
        const NormChoice norm = parse_norm(norm_str);
        const RobustnessMode mode = parse_mode(mode_str);
        if (grid.empty()) grid = obed::default_eps_grid();

        if (solve->parsed())
            return run_solve(instance_path, out_dir, epsilon, norm, mode);
        if (radius->parsed()) return run_radius(instance_path, policy_path, out_dir, norm);
        if (certify->parsed()) return run_certify(instance_path, out_dir, norm, budget);
        if (sweep->parsed()) return run_sweep(instance_path, out_dir, grid, norm, mode);
        if (nash->parsed()) return run_nash(instance_path, out_dir);
        if (reduce->parsed())
            return run_reduce(instance_path, policy_path, out_dir, seed);
        if (geo->parsed()) {
            obed::geometric_experiment(grid, out_dir);
            return 0;
        }
        if (mc->parsed()) {
            obed::MonteCarloConfig config;
            config.n_instances = n_instances;
            config.seed = seed;
            config.eps_grid = grid;
            config.norm = norm;
            config.mode = mode;
            obed::montecarlo_experiment(config, out_dir,
                                        serial ? Exec::Serial : Exec::Parallel);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 3;
}
