#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "annulus/geometry.hpp"
#include "annulus/nonlinearity.hpp"
#include "annulus/perturbation_solver.hpp"
#include "annulus/transmission_solver.hpp"

namespace annulus {

enum class SolveMode { General, Perturbed, Radial };

std::string mode_name(SolveMode mode);

// Outer Dirichlet data: a constant or a trigonometric series in the
// boundary parameter.
struct BoundaryData {
  bool constant = true;
  double value = 0.0;
  TrigSeries series;  // used when !constant

  Eigen::VectorXd evaluate(const DiscreteBoundary& b) const;
};

struct EpsRange {
  double start = 0.0;
  double end = 1.0;
  double step = 0.1;
  std::vector<double> samples;  // epsilon values the stepper must land on
};

struct SeedSpec {
  bool radial = false;
  double t_i = 0.0;
};

// "zero" or "radial:T" with T a floating-point literal.
SeedSpec parse_seed(const std::string& text);

struct OutputSpec {
  int grid = 24;             // lattice resolution per axis / radial samples
  std::string prefix = "run";
};

struct ProblemConfig {
  SolveMode mode = SolveMode::General;
  int dimension = 2;  // 3 allowed in radial mode only

  CurvePtr outer;
  CurvePtr inner;
  int outer_nodes = 128;
  int inner_nodes = 128;

  BoundaryData dirichlet;

  ScalarBC transmission;  // F (general mode) or the radial f
  ScalarBC flux;          // G

  bool has_phi = false;  // perturbed form configured
  double lambda = 1.0;
  ScalarBC phi;
  double eps = 0.0;  // single epsilon for the radial perturbed form
  EpsRange eps_range;

  TransmissionOptions solver;
  NewtonOptions newton;
  SeedSpec seed;
  OutputSpec output;

  ContinuationOptions continuation() const;
};

// Parses the JSON problem document; throws ConfigError on any schema or
// value violation (unknown keys included).
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

}  // namespace annulus
