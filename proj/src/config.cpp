#include "annulus/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "annulus/errors.hpp"

namespace annulus {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw ConfigError(context + ": " + message);
}

const json& require_key(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.is_object()) fail(ctx, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ctx, std::string("missing required key \"") + key + "\"");
  return *it;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  if (!obj.is_object()) fail(ctx, "expected an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
      return item.key() == k;
    });
    if (!known) fail(ctx, "unknown key \"" + item.key() + "\"");
  }
}

double as_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) fail(ctx, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& ctx) {
  if (!v.is_string()) fail(ctx, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& ctx) {
  if (!v.is_array()) fail(ctx, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_number(e, ctx));
  return out;
}

Vec2 as_point(const json& v, const std::string& ctx) {
  const auto arr = as_number_array(v, ctx);
  if (arr.size() != 2) fail(ctx, "expected a two-entry [x, y] array");
  return {arr[0], arr[1]};
}

// Coefficient arrays map directly onto the series: cos[0] is the constant
// term, cos[m]/sin[m] the m-th harmonics (sin[0] is ignored). Key checking
// stays with the caller (the arrays may sit next to other keys).
TrigSeries parse_series(const json& obj, const std::string& ctx) {
  TrigSeries ts;
  if (obj.contains("cos")) ts.cos_coef = as_number_array(obj.at("cos"), ctx + ".cos");
  if (obj.contains("sin")) ts.sin_coef = as_number_array(obj.at("sin"), ctx + ".sin");
  if (ts.cos_coef.empty()) ts.cos_coef = {0.0};
  if (ts.sin_coef.empty()) ts.sin_coef = {0.0};
  return ts;
}

CurvePtr parse_curve(const json& obj, const std::string& ctx) {
  const std::string kind = as_string(require_key(obj, "kind", ctx), ctx + ".kind");
  if (kind == "circle") {
    check_keys(obj, {"kind", "center", "radius"}, ctx);
    const Vec2 center = obj.contains("center") ? as_point(obj.at("center"), ctx + ".center")
                                               : Vec2{0.0, 0.0};
    const double radius = as_number(require_key(obj, "radius", ctx), ctx + ".radius");
    if (!(radius > 0.0)) fail(ctx, "circle radius must be positive");
    return std::make_shared<const Curve>(Curve::circle(center, radius));
  }
  if (kind == "ellipse") {
    check_keys(obj, {"kind", "center", "semi_axes"}, ctx);
    const Vec2 center = obj.contains("center") ? as_point(obj.at("center"), ctx + ".center")
                                               : Vec2{0.0, 0.0};
    const Vec2 axes = as_point(require_key(obj, "semi_axes", ctx), ctx + ".semi_axes");
    if (!(axes.x > 0.0 && axes.y > 0.0)) fail(ctx, "ellipse semi-axes must be positive");
    return std::make_shared<const Curve>(Curve::ellipse(center, axes.x, axes.y));
  }
  if (kind == "trig") {
    check_keys(obj, {"kind", "x", "y"}, ctx);
    const json& xs_obj = require_key(obj, "x", ctx);
    const json& ys_obj = require_key(obj, "y", ctx);
    check_keys(xs_obj, {"cos", "sin"}, ctx + ".x");
    check_keys(ys_obj, {"cos", "sin"}, ctx + ".y");
    const TrigSeries xs = parse_series(xs_obj, ctx + ".x");
    const TrigSeries ys = parse_series(ys_obj, ctx + ".y");
    return std::make_shared<const Curve>(Curve::trig_polynomial(xs, ys));
  }
  fail(ctx, "curve kind must be \"circle\", \"ellipse\", or \"trig\"");
}

ScalarBC parse_scalar_bc(const json& obj, const std::string& ctx) {
  const std::string kind = as_string(require_key(obj, "kind", ctx), ctx + ".kind");
  if (kind == "constant") {
    check_keys(obj, {"kind", "value"}, ctx);
    return ScalarBC::constant(as_number(require_key(obj, "value", ctx), ctx + ".value"));
  }
  if (kind == "polynomial") {
    check_keys(obj, {"kind", "coefficients", "modulation"}, ctx);
    const auto coeffs =
        as_number_array(require_key(obj, "coefficients", ctx), ctx + ".coefficients");
    if (coeffs.empty()) fail(ctx, "polynomial needs at least one coefficient");
    ScalarBC bc = ScalarBC::polynomial(coeffs);
    if (obj.contains("modulation")) {
      const json& mods = obj.at("modulation");
      if (!mods.is_array()) fail(ctx + ".modulation", "expected an array");
      for (std::size_t m = 0; m < mods.size(); ++m) {
        const std::string mctx = ctx + ".modulation[" + std::to_string(m) + "]";
        const json& entry = mods[m];
        check_keys(entry, {"index", "cos", "sin"}, mctx);
        const int index = as_int(require_key(entry, "index", mctx), mctx + ".index");
        if (index < 0 || index >= static_cast<int>(coeffs.size())) {
          fail(mctx, "index must address one of the polynomial coefficients");
        }
        bc.modulate_coefficient(index, parse_series(entry, mctx));
      }
    }
    return bc;
  }
  fail(ctx, "scalar nonlinearity kind must be \"constant\" or \"polynomial\"");
}

BoundaryData parse_dirichlet(const json& obj, const std::string& ctx) {
  const std::string kind = as_string(require_key(obj, "kind", ctx), ctx + ".kind");
  BoundaryData data;
  if (kind == "constant") {
    check_keys(obj, {"kind", "value"}, ctx);
    data.constant = true;
    data.value = as_number(require_key(obj, "value", ctx), ctx + ".value");
    return data;
  }
  if (kind == "fourier") {
    check_keys(obj, {"kind", "cos", "sin"}, ctx);
    data.constant = false;
    data.series = parse_series(obj, ctx);
    return data;
  }
  fail(ctx, "dirichlet kind must be \"constant\" or \"fourier\"");
}

void validate_node_count(int n, const std::string& ctx) {
  if (n < 8 || n % 2 != 0) fail(ctx, "node counts must be even and at least 8");
}

}  // namespace

std::string mode_name(SolveMode mode) {
  switch (mode) {
    case SolveMode::General: return "general";
    case SolveMode::Perturbed: return "perturbed";
    case SolveMode::Radial: return "radial";
  }
  return "unknown";
}

Eigen::VectorXd BoundaryData::evaluate(const DiscreteBoundary& b) const {
  Eigen::VectorXd out(b.node_count);
  for (int j = 0; j < b.node_count; ++j) {
    out[j] = constant ? value : series.eval(b.param[j]);
  }
  return out;
}

SeedSpec parse_seed(const std::string& text) {
  SeedSpec spec;
  if (text == "zero") return spec;
  const std::string tag = "radial:";
  if (text.rfind(tag, 0) == 0) {
    const std::string num = text.substr(tag.size());
    std::size_t used = 0;
    try {
      spec.t_i = std::stod(num, &used);
    } catch (const std::exception&) {
      throw ConfigError("seed: cannot parse \"" + text + "\" (want zero or radial:T)");
    }
    if (used != num.size()) {
      throw ConfigError("seed: trailing characters in \"" + text + "\"");
    }
    spec.radial = true;
    return spec;
  }
  throw ConfigError("seed: \"" + text + "\" is not \"zero\" or \"radial:T\"");
}

ContinuationOptions ProblemConfig::continuation() const {
  ContinuationOptions opts;
  opts.eps_start = eps_range.start;
  opts.eps_end = eps_range.end;
  opts.initial_step = eps_range.step;
  opts.must_hit = eps_range.samples;
  opts.newton = newton;
  return opts;
}

ProblemConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, {"mode", "dimension", "geometry", "data", "problem", "solver", "output"},
             "config");

  ProblemConfig cfg;

  const std::string mode = as_string(require_key(root, "mode", "config"), "config.mode");
  if (mode == "general") {
    cfg.mode = SolveMode::General;
  } else if (mode == "perturbed") {
    cfg.mode = SolveMode::Perturbed;
  } else if (mode == "radial") {
    cfg.mode = SolveMode::Radial;
  } else {
    fail("config.mode", "must be \"general\", \"perturbed\", or \"radial\"");
  }

  if (root.contains("dimension")) {
    cfg.dimension = as_int(root.at("dimension"), "config.dimension");
    if (cfg.dimension != 2 && cfg.dimension != 3) fail("config.dimension", "must be 2 or 3");
    if (cfg.dimension == 3 && cfg.mode != SolveMode::Radial) {
      fail("config.dimension", "dimension 3 is available in radial mode only");
    }
  }

  const json& geometry = require_key(root, "geometry", "config");
  check_keys(geometry, {"outer", "inner", "outer_nodes", "inner_nodes"}, "geometry");
  cfg.outer = parse_curve(require_key(geometry, "outer", "geometry"), "geometry.outer");
  cfg.inner = parse_curve(require_key(geometry, "inner", "geometry"), "geometry.inner");
  if (geometry.contains("outer_nodes")) {
    cfg.outer_nodes = as_int(geometry.at("outer_nodes"), "geometry.outer_nodes");
  }
  if (geometry.contains("inner_nodes")) {
    cfg.inner_nodes = as_int(geometry.at("inner_nodes"), "geometry.inner_nodes");
  }
  validate_node_count(cfg.outer_nodes, "geometry.outer_nodes");
  validate_node_count(cfg.inner_nodes, "geometry.inner_nodes");

  const json& data = require_key(root, "data", "config");
  check_keys(data, {"dirichlet"}, "data");
  cfg.dirichlet = parse_dirichlet(require_key(data, "dirichlet", "data"), "data.dirichlet");

  const json& problem = require_key(root, "problem", "config");
  if (cfg.mode == SolveMode::General) {
    check_keys(problem, {"transmission", "flux"}, "problem");
    cfg.transmission =
        parse_scalar_bc(require_key(problem, "transmission", "problem"), "problem.transmission");
    cfg.flux = parse_scalar_bc(require_key(problem, "flux", "problem"), "problem.flux");
  } else if (cfg.mode == SolveMode::Perturbed) {
    check_keys(problem, {"lambda", "phi", "flux", "eps_range"}, "problem");
    cfg.lambda = as_number(require_key(problem, "lambda", "problem"), "problem.lambda");
    if (!(cfg.lambda > 0.0)) fail("problem.lambda", "must be positive");
    cfg.phi = parse_scalar_bc(require_key(problem, "phi", "problem"), "problem.phi");
    cfg.has_phi = true;
    cfg.flux = parse_scalar_bc(require_key(problem, "flux", "problem"), "problem.flux");
    const json& range = require_key(problem, "eps_range", "problem");
    check_keys(range, {"start", "end", "step", "samples"}, "problem.eps_range");
    cfg.eps_range.start =
        as_number(require_key(range, "start", "problem.eps_range"), "problem.eps_range.start");
    cfg.eps_range.end =
        as_number(require_key(range, "end", "problem.eps_range"), "problem.eps_range.end");
    if (range.contains("step")) {
      cfg.eps_range.step = as_number(range.at("step"), "problem.eps_range.step");
    }
    if (!(cfg.eps_range.step > 0.0)) fail("problem.eps_range.step", "must be positive");
    if (range.contains("samples")) {
      cfg.eps_range.samples = as_number_array(range.at("samples"), "problem.eps_range.samples");
    }
  } else {
    check_keys(problem, {"transmission", "flux", "lambda", "phi", "eps"}, "problem");
    cfg.transmission =
        parse_scalar_bc(require_key(problem, "transmission", "problem"), "problem.transmission");
    cfg.flux = parse_scalar_bc(require_key(problem, "flux", "problem"), "problem.flux");
    if (problem.contains("lambda")) {
      cfg.lambda = as_number(problem.at("lambda"), "problem.lambda");
      if (!(cfg.lambda > 0.0)) fail("problem.lambda", "must be positive");
    }
    if (problem.contains("phi")) {
      cfg.phi = parse_scalar_bc(problem.at("phi"), "problem.phi");
      cfg.has_phi = true;
    }
    if (problem.contains("eps")) cfg.eps = as_number(problem.at("eps"), "problem.eps");
  }

  if (root.contains("solver")) {
    const json& solver = root.at("solver");
    check_keys(solver,
               {"damping", "tolerance", "max_iterations", "seed", "newton_tolerance",
                "newton_max_iterations", "state_cap", "stall_window", "invert_t_max"},
               "solver");
    if (solver.contains("damping")) {
      cfg.solver.damping = as_number(solver.at("damping"), "solver.damping");
      if (!(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0)) {
        fail("solver.damping", "must lie in (0, 1]");
      }
    }
    if (solver.contains("tolerance")) {
      cfg.solver.tolerance = as_number(solver.at("tolerance"), "solver.tolerance");
      if (!(cfg.solver.tolerance > 0.0)) fail("solver.tolerance", "must be positive");
    }
    if (solver.contains("max_iterations")) {
      cfg.solver.max_iterations = as_int(solver.at("max_iterations"), "solver.max_iterations");
      if (cfg.solver.max_iterations < 1) fail("solver.max_iterations", "must be at least 1");
    }
    if (solver.contains("state_cap")) {
      cfg.solver.state_cap = as_number(solver.at("state_cap"), "solver.state_cap");
    }
    if (solver.contains("stall_window")) {
      cfg.solver.stall_window = as_int(solver.at("stall_window"), "solver.stall_window");
    }
    if (solver.contains("invert_t_max")) {
      cfg.solver.invert_t_max = as_number(solver.at("invert_t_max"), "solver.invert_t_max");
    }
    if (solver.contains("newton_tolerance")) {
      cfg.newton.tolerance = as_number(solver.at("newton_tolerance"), "solver.newton_tolerance");
      if (!(cfg.newton.tolerance > 0.0)) fail("solver.newton_tolerance", "must be positive");
    }
    if (solver.contains("newton_max_iterations")) {
      cfg.newton.max_iterations =
          as_int(solver.at("newton_max_iterations"), "solver.newton_max_iterations");
      if (cfg.newton.max_iterations < 1) fail("solver.newton_max_iterations", "must be at least 1");
    }
    if (solver.contains("seed")) {
      cfg.seed = parse_seed(as_string(solver.at("seed"), "solver.seed"));
    }
  }

  if (root.contains("output")) {
    const json& output = root.at("output");
    check_keys(output, {"grid", "prefix"}, "output");
    if (output.contains("grid")) {
      cfg.output.grid = as_int(output.at("grid"), "output.grid");
      if (cfg.output.grid < 2) fail("output.grid", "must be at least 2");
    }
    if (output.contains("prefix")) {
      cfg.output.prefix = as_string(output.at("prefix"), "output.prefix");
      if (cfg.output.prefix.empty()) fail("output.prefix", "must be nonempty");
      if (cfg.output.prefix.find('/') != std::string::npos ||
          cfg.output.prefix.find('\\') != std::string::npos) {
        fail("output.prefix", "must not contain path separators");
      }
    }
  }

  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace annulus
