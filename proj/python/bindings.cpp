// Python bindings: geometry construction, the two solvers, and the
// closed-form concentric benchmark.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <utility>
#include <vector>

#include "annulus/boundary_ops.hpp"
#include "annulus/errors.hpp"
#include "annulus/geometry.hpp"
#include "annulus/nonlinearity.hpp"
#include "annulus/perturbation_solver.hpp"
#include "annulus/potentials.hpp"
#include "annulus/radial_oracle.hpp"
#include "annulus/transmission_solver.hpp"

namespace py = pybind11;
using namespace annulus;

namespace {

// Const-pointer facades: the C++ API hands out shared_ptr<const T>, which
// pybind11 holders do not model directly.
struct PyCurve {
  CurvePtr ptr;
};

struct PyBoundary {
  BoundaryPtr ptr;
};

TrigSeries make_series(std::vector<double> cos_coef, std::vector<double> sin_coef) {
  TrigSeries ts;
  if (!cos_coef.empty()) ts.cos_coef = std::move(cos_coef);
  if (!sin_coef.empty()) ts.sin_coef = std::move(sin_coef);
  return ts;
}

TransmissionOptions make_options(double damping, double tolerance, int max_iterations) {
  TransmissionOptions opts;
  opts.damping = damping;
  opts.tolerance = tolerance;
  opts.max_iterations = max_iterations;
  return opts;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::Inner: return "inner";
    case Region::Annulus: return "annulus";
    case Region::Exterior: return "exterior";
    case Region::Boundary: return "boundary";
  }
  return "unknown";
}

std::vector<Vec2> to_points(const std::vector<std::pair<double, double>>& pts) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({p.first, p.second});
  return out;
}

py::list grid_to_list(const FieldGrid& grid) {
  py::list out;
  for (const FieldSample& s : grid) {
    out.append(py::make_tuple(s.point.x, s.point.y, region_name(s.region), s.value));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-phase boundary-element transmission solver";

  py::register_exception<GeometryError>(m, "GeometryError");
  py::register_exception<NearFieldError>(m, "NearFieldError");
  py::register_exception<LinearAlgebraError>(m, "LinearAlgebraError");
  py::register_exception<NonInvertibleError>(m, "NonInvertibleError");
  py::register_exception<CapacityError>(m, "CapacityError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<PyCurve>(m, "Curve")
      .def_static(
          "circle",
          [](double cx, double cy, double radius) {
            return PyCurve{std::make_shared<const Curve>(Curve::circle({cx, cy}, radius))};
          },
          py::arg("cx"), py::arg("cy"), py::arg("radius"))
      .def_static(
          "ellipse",
          [](double cx, double cy, double semi_x, double semi_y) {
            return PyCurve{
                std::make_shared<const Curve>(Curve::ellipse({cx, cy}, semi_x, semi_y))};
          },
          py::arg("cx"), py::arg("cy"), py::arg("semi_x"), py::arg("semi_y"))
      .def_static(
          "trig",
          [](std::vector<double> cos_x, std::vector<double> sin_x, std::vector<double> cos_y,
             std::vector<double> sin_y) {
            return PyCurve{std::make_shared<const Curve>(Curve::trig_polynomial(
                make_series(std::move(cos_x), std::move(sin_x)),
                make_series(std::move(cos_y), std::move(sin_y))))};
          },
          py::arg("cos_x"), py::arg("sin_x"), py::arg("cos_y"), py::arg("sin_y"))
      .def_property_readonly("diameter", [](const PyCurve& c) { return c.ptr->diameter(); })
      .def_property_readonly("is_circle", [](const PyCurve& c) { return c.ptr->is_circle(); })
      .def("contains",
           [](const PyCurve& c, double x, double y) { return c.ptr->contains({x, y}); });

  py::class_<PyBoundary>(m, "Boundary")
      .def_property_readonly("node_count",
                             [](const PyBoundary& b) { return b.ptr->node_count; })
      .def_property_readonly("perimeter", [](const PyBoundary& b) { return b.ptr->perimeter(); })
      .def_property_readonly("nodes",
                             [](const PyBoundary& b) {
                               Eigen::MatrixXd pts(b.ptr->node_count, 2);
                               for (int j = 0; j < b.ptr->node_count; ++j) {
                                 pts(j, 0) = b.ptr->node[j].x;
                                 pts(j, 1) = b.ptr->node[j].y;
                               }
                               return pts;
                             })
      .def_property_readonly("weights", [](const PyBoundary& b) {
        Eigen::VectorXd w(b.ptr->node_count);
        for (int j = 0; j < b.ptr->node_count; ++j) w[j] = b.ptr->weight[j];
        return w;
      });

  m.def(
      "discretize",
      [](const PyCurve& c, int node_count) { return PyBoundary{discretize(c.ptr, node_count)}; },
      py::arg("curve"), py::arg("node_count"));

  m.def(
      "equilibrium_constant",
      [](const PyBoundary& b) { return equilibrium_density(*b.ptr).c; },
      py::arg("boundary"),
      "Equilibrium potential constant c of the curve (capacity guard value)");

  py::class_<ScalarBC>(m, "ScalarBC")
      .def_static("constant", &ScalarBC::constant, py::arg("value"))
      .def_static("polynomial", &ScalarBC::polynomial, py::arg("coefficients"))
      .def(
          "modulate_coefficient",
          [](ScalarBC& bc, int index, std::vector<double> cos_coef,
             std::vector<double> sin_coef) {
            bc.modulate_coefficient(index, make_series(std::move(cos_coef), std::move(sin_coef)));
          },
          py::arg("index"), py::arg("cos"), py::arg("sin"))
      .def("__call__", &ScalarBC::eval, py::arg("s"), py::arg("t"))
      .def("eval_dt", &ScalarBC::eval_dt, py::arg("s"), py::arg("t"));

  py::class_<DensityState>(m, "DensityState")
      .def_readwrite("mu_o", &DensityState::mu_o)
      .def_readwrite("mu", &DensityState::mu)
      .def_readwrite("eta", &DensityState::eta)
      .def("sup_norm", &DensityState::sup_norm);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("final_residual", &SolveReport::final_residual)
      .def_readonly("residual_history", &SolveReport::residual_history)
      .def_readonly("diagnostic", &SolveReport::diagnostic);

  py::class_<TransmissionProblem>(m, "TransmissionProblem")
      .def(py::init([](const PyBoundary& outer, const PyBoundary& inner, Eigen::VectorXd f_o,
                       const ScalarBC& transmission, const ScalarBC& flux, double damping,
                       double tolerance, int max_iterations) {
             return new TransmissionProblem(outer.ptr, inner.ptr, std::move(f_o), transmission,
                                            flux, make_options(damping, tolerance,
                                                               max_iterations));
           }),
           py::arg("outer"), py::arg("inner"), py::arg("dirichlet"), py::arg("transmission"),
           py::arg("flux"), py::arg("damping") = 0.5, py::arg("tolerance") = 1e-9,
           py::arg("max_iterations") = 500)
      .def("zero_state", &TransmissionProblem::zero_state)
      .def("radial_seed", &TransmissionProblem::radial_seed, py::arg("t_i"))
      .def("solve", &TransmissionProblem::solve, py::arg("initial"))
      .def("trace_u_i", &TransmissionProblem::trace_u_i, py::arg("state"))
      .def("trace_u_o_inner", &TransmissionProblem::trace_u_o_inner, py::arg("state"))
      .def("trace_u_o_outer", &TransmissionProblem::trace_u_o_outer, py::arg("state"))
      .def("interior_mean", &TransmissionProblem::interior_mean, py::arg("state"))
      .def(
          "reconstruct",
          [](const TransmissionProblem& p, const DensityState& s,
             const std::vector<std::pair<double, double>>& pts, double cutoff_rel) {
            return grid_to_list(p.reconstruct(s, to_points(pts), cutoff_rel));
          },
          py::arg("state"), py::arg("points"), py::arg("cutoff_rel") = 1e-3);

  py::class_<PerturbState>(m, "PerturbState")
      .def_readwrite("mu_o", &PerturbState::mu_o)
      .def_readwrite("eta_o", &PerturbState::eta_o)
      .def_readwrite("eta_i", &PerturbState::eta_i)
      .def("sup_norm", &PerturbState::sup_norm);

  py::class_<BranchPoint>(m, "BranchPoint")
      .def_readonly("eps", &BranchPoint::eps)
      .def_readonly("state", &BranchPoint::state)
      .def_readonly("iterations", &BranchPoint::iterations)
      .def_readonly("residual", &BranchPoint::residual)
      .def_readonly("sigma_min", &BranchPoint::sigma_min);

  py::class_<ContinuationResult>(m, "ContinuationResult")
      .def_readonly("points", &ContinuationResult::points)
      .def_readonly("reached_end", &ContinuationResult::reached_end)
      .def_readonly("fold_detected", &ContinuationResult::fold_detected)
      .def_readonly("fold_eps", &ContinuationResult::fold_eps)
      .def_readonly("sigma_first", &ContinuationResult::sigma_first)
      .def_readonly("sigma_last", &ContinuationResult::sigma_last)
      .def_readonly("fd_check_max", &ContinuationResult::fd_check_max)
      .def_readonly("gamma_tilde_min", &ContinuationResult::gamma_tilde_min)
      .def_readonly("warnings", &ContinuationResult::warnings)
      .def_readonly("fold_message", &ContinuationResult::fold_message);

  py::class_<PerturbedProblem>(m, "PerturbedProblem")
      .def(py::init([](const PyBoundary& outer, const PyBoundary& inner, Eigen::VectorXd f_o,
                       double lambda, const ScalarBC& phi, const ScalarBC& flux, double damping,
                       double tolerance, int max_iterations) {
             return new PerturbedProblem(outer.ptr, inner.ptr, std::move(f_o), lambda, phi, flux,
                                         make_options(damping, tolerance, max_iterations));
           }),
           py::arg("outer"), py::arg("inner"), py::arg("dirichlet"), py::arg("lam"),
           py::arg("phi"), py::arg("flux"), py::arg("damping") = 0.5,
           py::arg("tolerance") = 1e-9, py::arg("max_iterations") = 500)
      .def("solve_epsilon_zero",
           [](const PerturbedProblem& p) { return p.solve_epsilon_zero(); })
      .def("radial_seed", &PerturbedProblem::radial_seed, py::arg("t_i"))
      .def(
          "newton_solve",
          [](const PerturbedProblem& p, double eps, const PerturbState& initial, double tolerance,
             int max_iterations) {
            NewtonOptions opts;
            opts.tolerance = tolerance;
            opts.max_iterations = max_iterations;
            return p.newton_solve(eps, initial, opts);
          },
          py::arg("eps"), py::arg("initial"), py::arg("tolerance") = 1e-10,
          py::arg("max_iterations") = 25)
      .def(
          "continue_in_epsilon",
          [](const PerturbedProblem& p, double eps_start, double eps_end, double initial_step,
             std::vector<double> must_hit) {
            ContinuationOptions opts;
            opts.eps_start = eps_start;
            opts.eps_end = eps_end;
            opts.initial_step = initial_step;
            opts.must_hit = std::move(must_hit);
            return p.continue_in_epsilon(opts);
          },
          py::arg("eps_start") = 0.0, py::arg("eps_end") = 1.0, py::arg("initial_step") = 0.1,
          py::arg("must_hit") = std::vector<double>{})
      .def("inner_trace", &PerturbedProblem::inner_trace, py::arg("state"))
      .def("interior_mean", &PerturbedProblem::interior_mean, py::arg("state"))
      .def("residual_norm", &PerturbedProblem::residual_norm, py::arg("eps"), py::arg("state"))
      .def(
          "reconstruct",
          [](const PerturbedProblem& p, const PerturbState& s,
             const std::vector<std::pair<double, double>>& pts, double cutoff_rel) {
            return grid_to_list(p.reconstruct(s, to_points(pts), cutoff_rel));
          },
          py::arg("state"), py::arg("points"), py::arg("cutoff_rel") = 1e-3);

  py::class_<RadialProblem>(m, "RadialProblem")
      .def(py::init<>())
      .def_readwrite("dimension", &RadialProblem::dimension)
      .def_readwrite("outer_radius", &RadialProblem::outer_radius)
      .def_readwrite("inner_radius", &RadialProblem::inner_radius)
      .def_readwrite("t_o", &RadialProblem::t_o)
      .def_readwrite("f", &RadialProblem::f)
      .def_readwrite("g", &RadialProblem::g)
      .def_readwrite("lam", &RadialProblem::lambda)
      .def_readwrite("eps", &RadialProblem::eps)
      .def_readwrite("phi", &RadialProblem::phi)
      .def("ratio", &RadialProblem::ratio);

  m.def(
      "radial_roots",
      [](const RadialProblem& p, double lo, double hi, bool detect_tangential) {
        RadialRootOptions opts;
        opts.lo = lo;
        opts.hi = hi;
        opts.detect_tangential = detect_tangential;
        return radial_roots(p, opts);
      },
      py::arg("problem"), py::arg("lo") = -1e3, py::arg("hi") = 1e3,
      py::arg("detect_tangential") = false);
  m.def(
      "radial_small_roots",
      [](const RadialProblem& p, double lo, double hi, bool detect_tangential) {
        RadialRootOptions opts;
        opts.lo = lo;
        opts.hi = hi;
        opts.detect_tangential = detect_tangential;
        return radial_small_roots(p, opts);
      },
      py::arg("problem"), py::arg("lo") = -1e3, py::arg("hi") = 1e3,
      py::arg("detect_tangential") = false);
  m.def("radial_outer_field", &radial_outer_field, py::arg("problem"), py::arg("t_i"),
        py::arg("radius"));
  m.def("gamma_fundamental", &gamma_fundamental, py::arg("dimension"), py::arg("t"));
  m.def("gamma_fundamental_prime", &gamma_fundamental_prime, py::arg("dimension"), py::arg("t"));
}
