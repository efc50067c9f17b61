#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <memory>

#include "annulus/geometry.hpp"

namespace annulus {

// Normalized fundamental solution of the Laplacian: log|x| / (2 pi) in the
// plane, -1 / (4 pi |x|) in space. Radial form, r > 0.
double fundamental_solution(int dimension, double r);
double fundamental_solution(Vec2 x);
double fundamental_solution(const std::array<double, 3>& x);
Vec2 grad_fundamental_solution(Vec2 x);
std::array<double, 3> grad_fundamental_solution(const std::array<double, 3>& x);

// Plain Nystrom evaluation of layer potentials at off-boundary points.
// Throws NearFieldError for points within 1e-3 * diameter of the boundary,
// where the trapezoid rule degrades.
double single_layer_eval(const DiscreteBoundary& b, const Eigen::VectorXd& phi, Vec2 x);
double double_layer_eval(const DiscreteBoundary& b, const Eigen::VectorXd& psi, Vec2 x);
Vec2 grad_single_layer_eval(const DiscreteBoundary& b, const Eigen::VectorXd& phi, Vec2 x);
Vec2 grad_double_layer_eval(const DiscreteBoundary& b, const Eigen::VectorXd& psi, Vec2 x);

enum class Region { Inner, Annulus, Exterior, Boundary };

// Region of p relative to a nested pair of curves. Points within
// band_rel * diameter of either curve classify as Boundary.
Region classify_point(const Curve& outer, const Curve& inner, Vec2 p, double band_rel = 1e-3);

struct FieldSample {
  Vec2 point;
  Region region = Region::Exterior;
  double value = 0.0;
};
using FieldGrid = std::vector<FieldSample>;

// Trigonometric interpolation coefficients of a smooth periodic function
// sampled at N equispaced nodes (N even).
struct TrigCoefficients {
  std::vector<double> a;  // a[0..N/2], a[N/2] is the Nyquist mode
  std::vector<double> b;  // b[1..N/2-1], b[0] unused
  static TrigCoefficients from_samples(const Eigen::VectorXd& values);
  double eval(double s) const;
  // Values at M equispaced nodes, M a multiple of the base count.
  Eigen::VectorXd resample(int node_count) const;
};

// Layer-potential evaluation with node counts chosen from the target's
// distance to the curve: the trapezoid rule for an off-boundary target at
// distance d needs ~ C * max|x'| / d nodes, so each target picks the
// coarsest cached refinement meeting that bound. Densities are given at the
// base nodes and resampled by trigonometric interpolation. Not thread-safe.
class FieldEvaluator {
 public:
  explicit FieldEvaluator(BoundaryPtr base);

  void set_single_density(const Eigen::VectorXd& eta);
  void set_double_density(const Eigen::VectorXd& psi);

  double single_layer(Vec2 x) const;
  double double_layer(Vec2 x) const;
  Vec2 grad_single_layer(Vec2 x) const;
  Vec2 grad_double_layer(Vec2 x) const;

  // Node count the refinement rule selects for x; throws NearFieldError if
  // the cap cannot meet the accuracy bound.
  int refinement_for(Vec2 x) const;

  static constexpr int max_nodes = 1 << 17;

 private:
  struct Level {
    std::vector<Vec2> node;
    std::vector<Vec2> normal;
    std::vector<double> weight;
    Eigen::VectorXd eta, psi;
    bool has_eta = false, has_psi = false;
  };

  Level& level(int n) const;
  const Level& level_for_target(Vec2 x, bool need_eta, bool need_psi) const;

  BoundaryPtr base_;
  double max_speed_ = 0.0;
  TrigCoefficients eta_coef_, psi_coef_;
  bool has_eta_ = false, has_psi_ = false;
  mutable std::map<int, Level> levels_;
};

}  // namespace annulus
