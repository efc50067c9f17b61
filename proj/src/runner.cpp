#include "annulus/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "annulus/boundary_ops.hpp"
#include "annulus/errors.hpp"
#include "annulus/potentials.hpp"
#include "annulus/radial_oracle.hpp"

namespace annulus {

namespace fs = std::filesystem;

namespace {

using ojson = nlohmann::ordered_json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Sidecar log: the only artifact that carries wall-clock timestamps.
class RunLog {
 public:
  RunLog(const fs::path& path, const std::string& command) : out_(path, std::ios::trunc) {
    line("start " + command);
  }
  ~RunLog() { line("end"); }
  void line(const std::string& msg) {
    if (out_) out_ << iso_now() << " " << msg << "\n";
  }

 private:
  std::ofstream out_;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

const char* region_label(Region r) { return r == Region::Inner ? "inner" : "annulus"; }

struct CheckList {
  ojson checks = ojson::array();
  int total = 0;
  int passed = 0;

  void add(const std::string& name, const std::string& where, double error, double tol) {
    const bool pass = error <= tol;
    ++total;
    if (pass) ++passed;
    ojson c;
    c["name"] = name;
    c["boundary"] = where;
    c["error"] = error;
    c["tolerance"] = tol;
    c["pass"] = pass;
    checks.push_back(std::move(c));
  }

  bool all_pass() const { return passed == total; }
};

// The operator identity battery on one discretized curve: Gauss trace of the
// unit double layer, weighted adjointness of W and W*, and (circles only)
// the exact single-layer spectrum.
void identity_suite(const BoundaryPtr& b, const std::string& label, CheckList& list) {
  const int n = b->node_count;
  const OperatorMatrix w = assemble_W(b);
  const OperatorMatrix wstar = assemble_Wstar(b);

  const Eigen::VectorXd row = w.mat * Eigen::VectorXd::Ones(n);
  list.add("w_row_sum", label, (row.array() - 0.5).abs().maxCoeff(), 1e-10);

  Eigen::VectorXd weights(n);
  for (int j = 0; j < n; ++j) weights[j] = b->weight[j];
  std::mt19937 rng(1234u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXd psi(n), phi(n);
    for (int j = 0; j < n; ++j) psi[j] = gauss(rng);
    for (int j = 0; j < n; ++j) phi[j] = gauss(rng);
    const double lhs = (w.mat * psi).cwiseProduct(weights).dot(phi);
    const double rhs = psi.cwiseProduct(weights).dot(wstar.mat * phi);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  list.add("w_adjointness", label, worst, 1e-10);

  if (b->curve->is_circle()) {
    const double a = b->curve->circle_radius();
    const OperatorMatrix v = assemble_V(b);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    list.add("v_eigen_constant", label,
             (v.mat * ones - a * std::log(a) * ones).cwiseAbs().maxCoeff(), 1e-10);
    double eig_err = 0.0;
    for (int k = 1; k <= 8; ++k) {
      Eigen::VectorXd ck(n), sk(n);
      for (int j = 0; j < n; ++j) {
        ck[j] = std::cos(k * b->param[j]);
        sk[j] = std::sin(k * b->param[j]);
      }
      const double lam = -a / (2.0 * k);
      eig_err = std::max(eig_err, (v.mat * ck - lam * ck).cwiseAbs().maxCoeff());
      eig_err = std::max(eig_err, (v.mat * sk - lam * sk).cwiseAbs().maxCoeff());
    }
    list.add("v_eigen_harmonics", label, eig_err, 1e-10);
  }
}

RadialProblem radial_from_config(const ProblemConfig& cfg) {
  if (!cfg.outer->is_circle() || !cfg.inner->is_circle()) {
    throw ConfigError("radial mode needs circle curves for both boundaries");
  }
  const Vec2 co = cfg.outer->center();
  const Vec2 ci = cfg.inner->center();
  RadialProblem rp;
  rp.dimension = cfg.dimension;
  rp.outer_radius = cfg.outer->circle_radius();
  rp.inner_radius = cfg.inner->circle_radius();
  if (std::hypot(co.x - ci.x, co.y - ci.y) > 1e-12 * rp.outer_radius) {
    throw ConfigError("radial mode needs concentric circles");
  }
  rp.center = co;
  if (!cfg.dirichlet.constant) {
    throw ConfigError("radial mode needs constant outer Dirichlet data");
  }
  rp.t_o = cfg.dirichlet.value;
  rp.f = cfg.transmission;
  rp.g = cfg.flux;
  rp.lambda = cfg.lambda;
  rp.eps = cfg.eps;
  rp.phi = cfg.phi;
  return rp;
}

}  // namespace

void apply_overrides(ProblemConfig& cfg, const RunOverrides& overrides) {
  if (overrides.nodes) {
    if (*overrides.nodes < 8 || *overrides.nodes % 2 != 0) {
      throw ConfigError("--nodes must be even and at least 8");
    }
    cfg.outer_nodes = *overrides.nodes;
    cfg.inner_nodes = *overrides.nodes;
  }
  if (overrides.seed) cfg.seed = *overrides.seed;
}

int cmd_verify(const ProblemConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  RunLog log(dir / (cfg.output.prefix + "_run.log"), "verify");

  const BoundaryPtr outer_b = discretize(cfg.outer, cfg.outer_nodes);
  const BoundaryPtr inner_b = discretize(cfg.inner, cfg.inner_nodes);

  CheckList list;
  identity_suite(outer_b, "outer", list);
  identity_suite(inner_b, "inner", list);

  ojson report;
  report["command"] = "verify";
  report["mode"] = mode_name(cfg.mode);
  report["outer_nodes"] = cfg.outer_nodes;
  report["inner_nodes"] = cfg.inner_nodes;
  report["checks"] = list.checks;

  bool capacity_ok = true;
  if (cfg.mode == SolveMode::Perturbed) {
    const EquilibriumDensity eq = equilibrium_density(*inner_b);
    capacity_ok = std::abs(eq.c) >= 1e-6;
    ojson cap;
    cap["equilibrium_constant"] = eq.c;
    cap["pass"] = capacity_ok;
    report["capacity"] = std::move(cap);
    if (!capacity_ok) {
      std::cout << "capacity guard: equilibrium constant c = " << g17(eq.c)
                << " (|c| < 1e-06); the inner curve sits at the degenerate "
                   "logarithmic-capacity scale - rescale the geometry and retry\n";
    }
  }
  const bool ok = list.all_pass() && capacity_ok;
  report["all_pass"] = ok;

  const fs::path report_path = dir / (cfg.output.prefix + "_verify.json");
  write_file(report_path, report.dump(2) + "\n");

  for (const auto& c : report["checks"]) {
    if (!c["pass"].get<bool>()) {
      std::cout << "FAIL " << c["name"].get<std::string>() << " (" << c["boundary"].get<std::string>()
                << "): error " << g17(c["error"].get<double>()) << " > tolerance "
                << g17(c["tolerance"].get<double>()) << "\n";
    }
  }
  std::cout << "verify: " << list.passed << "/" << list.total << " identity checks passed\n";
  std::cout << "wrote " << report_path.string() << "\n";
  log.line(ok ? "verify pass" : "verify fail");
  return ok ? 0 : 1;
}

int cmd_solve(const ProblemConfig& cfg, const std::string& out_dir) {
  if (cfg.mode != SolveMode::General) {
    throw ConfigError("solve runs mode \"general\" configs (got \"" + mode_name(cfg.mode) +
                      "\")");
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  RunLog log(dir / (cfg.output.prefix + "_run.log"), "solve");

  const BoundaryPtr outer_b = discretize(cfg.outer, cfg.outer_nodes);
  const BoundaryPtr inner_b = discretize(cfg.inner, cfg.inner_nodes);
  const Eigen::VectorXd f_o = cfg.dirichlet.evaluate(*outer_b);
  TransmissionProblem prob(outer_b, inner_b, f_o, cfg.transmission, cfg.flux, cfg.solver);
  const DensityState initial =
      cfg.seed.radial ? prob.radial_seed(cfg.seed.t_i) : prob.zero_state();
  const auto solved = prob.solve(initial);
  const DensityState& state = solved.first;
  const SolveReport& rep = solved.second;

  const Eigen::VectorXd u_i = prob.trace_u_i(state);
  const Eigen::VectorXd u_o_out = prob.trace_u_o_outer(state);

  ojson report;
  report["command"] = "solve";
  report["seed"] = cfg.seed.radial ? "radial:" + g17(cfg.seed.t_i) : std::string("zero");
  report["converged"] = rep.converged;
  report["iterations"] = rep.iterations;
  report["damping"] = rep.damping;
  report["tolerance"] = rep.tolerance;
  report["final_residual"] = {rep.final_residual[0], rep.final_residual[1],
                              rep.final_residual[2]};
  report["u_i_mean"] = prob.interior_mean(state);
  report["u_i_min"] = u_i.minCoeff();
  report["u_i_max"] = u_i.maxCoeff();
  report["u_o_outer_min"] = u_o_out.minCoeff();
  report["u_o_outer_max"] = u_o_out.maxCoeff();
  report["diagnostic"] = rep.diagnostic;
  report["residual_history"] = rep.residual_history;

  const fs::path report_path = dir / (cfg.output.prefix + "_report.json");
  write_file(report_path, report.dump(2) + "\n");

  // Lattice over the outer bounding box; grid-major rows, near-boundary and
  // exterior points dropped.
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool first = true;
  for (const Vec2 p : cfg.outer->samples()) {
    if (first) {
      xmin = xmax = p.x;
      ymin = ymax = p.y;
      first = false;
    } else {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  const int n = cfg.output.grid;
  std::vector<Vec2> pts;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Vec2 p{xmin + (xmax - xmin) * ix / (n - 1), ymin + (ymax - ymin) * iy / (n - 1)};
      const Region reg = classify_point(*cfg.outer, *cfg.inner, p);
      if (reg == Region::Inner || reg == Region::Annulus) pts.push_back(p);
    }
  }
  const FieldGrid grid = prob.reconstruct(state, pts);
  std::string csv = "x,y,region,value\n";
  for (const FieldSample& s : grid) {
    csv += g17(s.point.x);
    csv += ',';
    csv += g17(s.point.y);
    csv += ',';
    csv += region_label(s.region);
    csv += ',';
    csv += g17(s.value);
    csv += '\n';
  }
  const fs::path fields_path = dir / (cfg.output.prefix + "_fields.csv");
  write_file(fields_path, csv);

  if (rep.converged) {
    std::cout << "solve: converged in " << rep.iterations << " iterations; u_i mean "
              << g17(prob.interior_mean(state)) << "\n";
  } else {
    std::cout << "solve: NOT converged after " << rep.iterations << " iterations: "
              << rep.diagnostic << "\n";
  }
  std::cout << "wrote " << report_path.string() << "\n";
  std::cout << "wrote " << fields_path.string() << "\n";
  log.line(rep.converged ? "solve converged" : "solve failed");
  return rep.converged ? 0 : 1;
}

int cmd_continue(const ProblemConfig& cfg, const std::string& out_dir) {
  if (cfg.mode != SolveMode::Perturbed) {
    throw ConfigError("continue runs mode \"perturbed\" configs (got \"" + mode_name(cfg.mode) +
                      "\")");
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  RunLog log(dir / (cfg.output.prefix + "_run.log"), "continue");

  const BoundaryPtr outer_b = discretize(cfg.outer, cfg.outer_nodes);
  const BoundaryPtr inner_b = discretize(cfg.inner, cfg.inner_nodes);
  const Eigen::VectorXd f_o = cfg.dirichlet.evaluate(*outer_b);
  PerturbedProblem prob(outer_b, inner_b, f_o, cfg.lambda, cfg.phi, cfg.flux, cfg.solver);

  const ContinuationOptions copts = cfg.continuation();
  const ContinuationResult res =
      cfg.seed.radial ? prob.continue_in_epsilon(copts, prob.radial_seed(cfg.seed.t_i))
                      : prob.continue_in_epsilon(copts);

  std::string jsonl;
  for (const BranchPoint& bp : res.points) {
    const Eigen::VectorXd trace = prob.inner_trace(bp.state);
    ojson line;
    line["eps"] = bp.eps;
    line["u_i_mean"] = prob.interior_mean(bp.state);
    line["trace_min"] = trace.minCoeff();
    line["trace_max"] = trace.maxCoeff();
    line["sigma_min"] = bp.sigma_min;
    line["newton_iterations"] = bp.iterations;
    line["residual"] = bp.residual;
    jsonl += line.dump();
    jsonl += '\n';
  }
  ojson tail;
  tail["summary"] = true;
  tail["fold"] = res.fold_detected;
  tail["fold_eps"] = res.fold_eps;
  tail["reached_end"] = res.reached_end;
  tail["final_step"] = res.final_step;
  tail["sigma_first"] = res.sigma_first;
  tail["sigma_last"] = res.sigma_last;
  tail["fd_check_max"] = res.fd_check_max;
  tail["gamma_tilde_min"] = res.gamma_tilde_min;
  tail["warnings"] = res.warnings;
  tail["message"] = res.fold_message;
  jsonl += tail.dump();
  jsonl += '\n';

  const fs::path branch_path = dir / (cfg.output.prefix + "_branch.jsonl");
  write_file(branch_path, jsonl);

  std::cout << "continue: " << res.points.size() << " accepted points, eps from "
            << g17(res.points.front().eps) << " to " << g17(res.points.back().eps) << "\n";
  if (res.fold_detected) {
    std::cout << "fold detected at eps = " << g17(res.fold_eps) << "\n";
  } else if (!res.reached_end) {
    std::cout << "branch stopped before the target without a fold\n";
  }
  std::cout << "wrote " << branch_path.string() << "\n";
  log.line(res.fold_detected ? "continue fold" : (res.reached_end ? "continue end" : "continue stall"));
  return (res.reached_end || res.fold_detected) ? 0 : 1;
}

int cmd_radial(const ProblemConfig& cfg, const std::string& out_dir) {
  if (cfg.mode != SolveMode::Radial) {
    throw ConfigError("radial runs mode \"radial\" configs (got \"" + mode_name(cfg.mode) +
                      "\")");
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  RunLog log(dir / (cfg.output.prefix + "_run.log"), "radial");

  const RadialProblem rp = radial_from_config(cfg);
  RadialRootOptions ropts;
  ropts.detect_tangential = true;  // report even-multiplicity benchmark roots
  const std::vector<double> roots =
      cfg.has_phi ? radial_small_roots(rp, ropts) : radial_roots(rp, ropts);

  ojson out;
  out["command"] = "radial";
  out["form"] = cfg.has_phi ? "perturbed" : "general";
  out["dimension"] = rp.dimension;
  out["outer_radius"] = rp.outer_radius;
  out["inner_radius"] = rp.inner_radius;
  out["t_o"] = rp.t_o;
  out["ratio"] = rp.ratio();
  if (cfg.has_phi) {
    out["lambda"] = rp.lambda;
    out["eps"] = rp.eps;
  }
  out["roots"] = roots;

  std::string csv = "t_i,radius,value\n";
  ojson fields = ojson::array();
  const int n = cfg.output.grid;
  for (const double t : roots) {
    ojson entry;
    entry["t_i"] = t;
    ojson samples = ojson::array();
    for (int j = 0; j < n; ++j) {
      const double radius = rp.outer_radius * j / (n - 1);
      const double value =
          radius < rp.inner_radius ? t : radial_outer_field(rp, t, radius);
      ojson s;
      s["radius"] = radius;
      s["value"] = value;
      samples.push_back(std::move(s));
      csv += g17(t);
      csv += ',';
      csv += g17(radius);
      csv += ',';
      csv += g17(value);
      csv += '\n';
    }
    entry["samples"] = std::move(samples);
    fields.push_back(std::move(entry));
  }
  out["fields"] = std::move(fields);

  const fs::path json_path = dir / (cfg.output.prefix + "_radial.json");
  const fs::path csv_path = dir / (cfg.output.prefix + "_radial.csv");
  write_file(json_path, out.dump(2) + "\n");
  write_file(csv_path, csv);

  std::ostringstream rootlist;
  rootlist << "[";
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (i > 0) rootlist << ", ";
    rootlist << g17(roots[i]);
  }
  rootlist << "]";
  std::cout << "radial roots: " << rootlist.str() << "\n";
  std::cout << "wrote " << json_path.string() << "\n";
  std::cout << "wrote " << csv_path.string() << "\n";
  log.line("radial done");
  return 0;
}

}  // namespace annulus
