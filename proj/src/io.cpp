#include "obed/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace obed {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::vector<std::vector<double>> matrix_field(const json& j, const char* key) {
    if (!j.contains(key)) throw std::runtime_error(std::string("missing key ") + key);
    return j.at(key).get<std::vector<std::vector<double>>>();
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

InstanceData load_instance(const std::string& path) {
    const json j = read_json(path);
    const auto edges = j.at("edges").get<std::size_t>();
    const auto states = j.at("states").get<std::size_t>();
    GameInstance inst(edges, states, j.at("prior").get<std::vector<double>>(),
                      matrix_field(j, "slope"), matrix_field(j, "intercept"));
    RecommendationSet X(matrix_field(j, "profiles"));
    return {std::move(inst), std::move(X)};
}

void save_instance(const std::string& path, const GameInstance& inst,
                   const RecommendationSet& X) {
    json j;
    j["edges"] = inst.edge_count;
    j["states"] = inst.state_count;
    j["prior"] = inst.prior;
    j["slope"] = inst.slope;
    j["intercept"] = inst.intercept;
    j["profiles"] = X.profiles;
    write_file(path, j.dump(2) + "\n");
}

SignalingPolicy load_policy(const std::string& path) {
    const json j = read_json(path);
    return SignalingPolicy(matrix_field(j, "weights"));
}

void save_policy(const std::string& path, const SignalingPolicy& pi) {
    json j;
    j["weights"] = pi.weights;
    write_file(path, j.dump(2) + "\n");
}

void write_solve_report(const std::string& path, const RobustSolveReport& report) {
    json j;
    j["epsilon"] = report.epsilon;
    j["status"] = report.status == LpStatus::Optimal ? "optimal" : "infeasible";
    if (report.status == LpStatus::Optimal) {
        j["value"] = report.value;
        j["policy"] = report.policy->weights;
    }
    json rows = json::array();
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        json row;
        row["r"] = report.pairs[i].r;
        row["a"] = report.pairs[i].a;
        row["lambda"] = report.lambda[i];
        row["slack"] = report.slack[i];
        row["vacuous"] = (bool)report.vacuous[i];
        rows.push_back(row);
    }
    j["pairs"] = rows;
    json act = json::array();
    for (const DeviationPair& p : report.active) act.push_back({p.r, p.a});
    j["active"] = act;
    write_file(path, j.dump(2) + "\n");
}

void write_slack_csv(const std::string& path, const RobustSolveReport& report) {
    std::ostringstream out;
    out << "pair_r,pair_a,slack,lambda,vacuous,active\n";
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        bool active = false;
        for (const DeviationPair& p : report.active)
            if (p == report.pairs[i]) active = true;
        out << report.pairs[i].r << ',' << report.pairs[i].a << ','
            << format_double(report.slack[i]) << ',' << format_double(report.lambda[i])
            << ',' << (report.vacuous[i] ? 1 : 0) << ',' << (active ? 1 : 0) << '\n';
    }
    write_file(path, out.str());
}

void write_certificate_csv(const std::string& path, const CertificateReport& report) {
    std::ostringstream out;
    out << "pair_r,pair_a,sigma_lo,sigma_hi,M,mass,rho_hat_term\n";
    for (const auto& term : report.pairs) {
        out << term.pair.r << ',' << term.pair.a << ','
            << format_double(term.sigma_lo) << ',' << format_double(term.sigma_hi)
            << ',' << format_double(term.big_m) << ',' << format_double(term.mass)
            << ',' << format_double(term.rho_term) << '\n';
    }
    write_file(path, out.str());
}

void write_sweep_csv(const std::string& path, const std::vector<SweepCsvRow>& rows) {
    std::ostringstream out;
    out << "epsilon,status,value,n_active,bound,fd_slope,differentiable\n";
    for (const SweepCsvRow& row : rows) {
        out << format_double(row.epsilon) << ','
            << (row.feasible ? "optimal" : "infeasible") << ',';
        if (row.feasible) out << format_double(row.value);
        out << ',' << row.n_active << ',';
        if (row.has_bound) out << format_double(row.bound);
        out << ',';
        if (row.feasible) out << format_double(row.fd_slope);
        out << ',' << (row.differentiable ? 1 : 0) << '\n';
    }
    write_file(path, out.str());
}

SvgCanvas::SvgCanvas(double width, double height, double x_min, double x_max,
                     double y_min, double y_max)
    : width_(width),
      height_(height),
      x_min_(x_min),
      x_max_(x_max),
      y_min_(y_min),
      y_max_(y_max) {}

double SvgCanvas::px(double x) const {
    return 50.0 + (x - x_min_) / (x_max_ - x_min_) * (width_ - 70.0);
}

double SvgCanvas::py(double y) const {
    return height_ - 40.0 - (y - y_min_) / (y_max_ - y_min_) * (height_ - 60.0);
}

void SvgCanvas::polyline(const std::vector<std::vector<double>>& pts,
                         const std::string& stroke, double width) {
    if (pts.size() < 2) return;
    std::ostringstream s;
    s << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
      << width << "\" points=\"";
    for (const auto& p : pts) s << format_double(px(p[0])) << ',' << format_double(py(p[1])) << ' ';
    s << "\"/>\n";
    body_ += s.str();
}

void SvgCanvas::polygon(const std::vector<std::vector<double>>& pts,
                        const std::string& fill, const std::string& stroke,
                        double opacity) {
    if (pts.size() < 3) return;
    std::ostringstream s;
    s << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << opacity
      << "\" stroke=\"" << stroke << "\" points=\"";
    for (const auto& p : pts) s << format_double(px(p[0])) << ',' << format_double(py(p[1])) << ' ';
    s << "\"/>\n";
    body_ += s.str();
}

void SvgCanvas::circle(double x, double y, double radius, const std::string& fill) {
    std::ostringstream s;
    s << "<circle cx=\"" << format_double(px(x)) << "\" cy=\"" << format_double(py(y))
      << "\" r=\"" << radius << "\" fill=\"" << fill << "\"/>\n";
    body_ += s.str();
}

void SvgCanvas::text(double x, double y, const std::string& label) {
    std::ostringstream s;
    s << "<text x=\"" << format_double(px(x)) << "\" y=\"" << format_double(py(y))
      << "\" font-size=\"11\" font-family=\"sans-serif\">" << label << "</text>\n";
    body_ += s.str();
}

void SvgCanvas::axes(const std::string& x_label, const std::string& y_label) {
    std::ostringstream s;
    s << "<line x1=\"" << px(x_min_) << "\" y1=\"" << py(y_min_) << "\" x2=\""
      << px(x_max_) << "\" y2=\"" << py(y_min_) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << px(x_min_) << "\" y1=\"" << py(y_min_) << "\" x2=\""
      << px(x_min_) << "\" y2=\"" << py(y_max_) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << px((x_min_ + x_max_) / 2) << "\" y=\"" << height_ - 8
      << "\" font-size=\"12\" font-family=\"sans-serif\">" << x_label << "</text>\n"
      << "<text x=\"8\" y=\"" << py((y_min_ + y_max_) / 2)
      << "\" font-size=\"12\" font-family=\"sans-serif\">" << y_label << "</text>\n"
      << "<text x=\"" << px(x_min_) - 8 << "\" y=\"" << py(y_min_) + 14
      << "\" font-size=\"10\" font-family=\"sans-serif\">" << format_double(x_min_)
      << "</text>\n"
      << "<text x=\"" << px(x_max_) - 8 << "\" y=\"" << py(y_min_) + 14
      << "\" font-size=\"10\" font-family=\"sans-serif\">" << format_double(x_max_)
      << "</text>\n"
      << "<text x=\"" << px(x_min_) - 40 << "\" y=\"" << py(y_max_) + 4
      << "\" font-size=\"10\" font-family=\"sans-serif\">" << format_double(y_max_)
      << "</text>\n";
    body_ += s.str();
}

void SvgCanvas::save(const std::string& path) const {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_ << "</svg>\n";
    write_file(path, s.str());
}

}  // namespace obed
