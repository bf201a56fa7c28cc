#pragma once

// Experiment drivers: the three-edge geometric example in (p1, p2) policy
// space, and the seeded Monte Carlo study of excess robust cost across
// random five-edge instances.

#include <cstdint>
#include <string>
#include <vector>

#include "obed/io.hpp"
#include "obed/robustness.hpp"

namespace obed {

// The three-edge, two-state instance with X = {x^(1), x^(2)}; policies are
// identified with p = (p1, p2), p_t = pi(x^(1) | omega_t).
InstanceData build_geometric_instance();

SignalingPolicy policy_from_p(double p1, double p2);

// Affine obedience boundary c0 + c1 p1 + c2 p2 = 0 for one deviation pair.
struct GeometricBoundary {
    DeviationPair pair;
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

struct GeometricReport {
    std::vector<GeometricBoundary> boundaries;
    std::vector<std::vector<double>> nominal_polygon;  // vertices in (p1, p2)
    std::vector<double> p_star0;
    double value0 = 0.0;
    double eps2 = 0.0;                     // certified radius of p*(0)
    double exact_radius0 = 0.0;            // conservative radius of p*(0)
    double eps3 = -1.0;                    // first grid eps beyond the radius, -1 if none
    std::vector<double> p_star_eps3;       // empty when eps3 < 0
    std::vector<double> eps_list;
    std::vector<std::vector<std::vector<double>>> region_polygons;  // per eps
    std::vector<bool> region_nonempty;
    std::vector<bool> p_star0_feasible;    // per eps, conservative p=1
};

// Half-plane coefficients of the conservative robust region at radius eps:
// rows (c0, c1, c2) with c0 + c1 p1 + c2 p2 >= 0.
std::vector<std::vector<double>> conservative_halfplanes(const InstanceData& data,
                                                         double eps);

// Sutherland-Hodgman clip of a convex polygon against c0 + c1 x + c2 y >= 0.
std::vector<std::vector<double>> clip_polygon(std::vector<std::vector<double>> poly,
                                              double c0, double c1, double c2);

// Runs the geometric experiment; writes geometric.csv, geometric.json, and
// geometric.svg into out_dir unless it is empty.
GeometricReport geometric_experiment(const std::vector<double>& eps_list,
                                     const std::string& out_dir);

struct MonteCarloConfig {
    std::size_t n_instances = 100;
    std::uint64_t seed = 1;
    std::vector<double> eps_grid;  // defaults to 0..0.4 step 0.02
    double favored_slope_lo = 0.2, favored_slope_hi = 0.5;
    double favored_intercept_lo = 0.4, favored_intercept_hi = 0.8;
    double other_slope_lo = 0.5, other_slope_hi = 1.0;
    double other_intercept_lo = 0.8, other_intercept_hi = 1.6;
    NormChoice norm = NormChoice::l1();
    RobustnessMode mode = RobustnessMode::Conservative;
};

std::vector<double> default_eps_grid();

// Five edges, five states, uniform prior; state omega_e favors edge e with
// the lower coefficient ranges. X is the fixed uniform-plus-concentrated set.
InstanceData generate_instance(std::uint64_t seed, const MonteCarloConfig& config);

struct TrajectoryPoint {
    double epsilon = 0.0;
    bool feasible = false;
    double value = 0.0;
    double excess_x1000 = 0.0;
};

struct MonteCarloResult {
    std::size_t n_generated = 0;
    std::vector<std::size_t> retained;                     // ids feasible at eps=0
    std::vector<std::vector<TrajectoryPoint>> trajectories;  // per retained id
    struct Summary {
        double epsilon = 0.0;
        std::size_t n_feasible = 0;
        double mean = 0.0;
        double median = 0.0;
        double q1 = 0.0;
        double q3 = 0.0;
    };
    std::vector<Summary> summary;
};

// Writes trajectories.csv, summary.csv, and excess.svg into out_dir unless
// it is empty. Output is byte-identical for a fixed config regardless of
// thread schedule.
MonteCarloResult montecarlo_experiment(const MonteCarloConfig& config,
                                       const std::string& out_dir,
                                       Exec exec = Exec::Parallel);

}  // namespace obed
