#pragma once

// File formats: instance and policy JSON, solve-report JSON, and the CSV /
// SVG writers shared by the CLI and the experiment drivers.

#include <string>
#include <vector>

#include "obed/design.hpp"
#include "obed/model.hpp"
#include "obed/robustness.hpp"
#include "obed/sensitivity.hpp"

namespace obed {

struct InstanceData {
    GameInstance inst;
    RecommendationSet profiles;
};

// Instance JSON: {"edges", "states", "prior", "slope" (|E|x|Omega|),
// "intercept" (|E|x|Omega|), "profiles" (KxE)}.
InstanceData load_instance(const std::string& path);
void save_instance(const std::string& path, const GameInstance& inst,
                   const RecommendationSet& X);

// Policy JSON: {"weights": |Omega|xK}.
SignalingPolicy load_policy(const std::string& path);
void save_policy(const std::string& path, const SignalingPolicy& pi);

void write_solve_report(const std::string& path, const RobustSolveReport& report);

// Columns: pair_r, pair_a, slack, lambda, vacuous, active.
void write_slack_csv(const std::string& path, const RobustSolveReport& report);

// Columns: pair_r, pair_a, sigma_lo, sigma_hi, M, mass, rho_hat_term.
void write_certificate_csv(const std::string& path, const CertificateReport& report);

// Columns: epsilon, status, value, n_active, bound, fd_slope, differentiable.
struct SweepCsvRow {
    double epsilon = 0.0;
    bool feasible = false;
    double value = 0.0;
    std::size_t n_active = 0;
    bool has_bound = false;
    double bound = 0.0;
    double fd_slope = 0.0;
    bool differentiable = false;
};
void write_sweep_csv(const std::string& path, const std::vector<SweepCsvRow>& rows);

std::string format_double(double v);

// Minimal SVG line/scatter renderer for the experiment figures.
class SvgCanvas {
  public:
    SvgCanvas(double width, double height, double x_min, double x_max,
              double y_min, double y_max);

    void polyline(const std::vector<std::vector<double>>& pts,
                  const std::string& stroke, double width = 1.0);
    void polygon(const std::vector<std::vector<double>>& pts,
                 const std::string& fill, const std::string& stroke,
                 double opacity = 1.0);
    void circle(double x, double y, double radius, const std::string& fill);
    void text(double x, double y, const std::string& label);
    void axes(const std::string& x_label, const std::string& y_label);

    void save(const std::string& path) const;

  private:
    double px(double x) const;
    double py(double y) const;

    double width_, height_;
    double x_min_, x_max_, y_min_, y_max_;
    std::string body_;
};

}  // namespace obed
