#pragma once

#include <Eigen/Dense>
#include <memory>

#include "annulus/geometry.hpp"

namespace annulus {

enum class OpTag {
  SingleLayer,      // V: log-singular, Kress-split quadrature
  DoubleLayer,      // W: continuous kernel, curvature diagonal
  AdjointDouble,    // W*: continuous kernel, curvature diagonal
  CrossSingle,      // single layer from source curve traced on target curve
  CrossDouble,      // double layer from source traced on target
  CrossNormalDeriv, // normal derivative on target of source double layer
  CompositeJ,
  CompositeJLambda,
  Bordered,
};

// Dense Nystrom matrix mapping node values on source to node values on
// target (rows: target, cols: source). Self operators have source == target.
struct OperatorMatrix {
  Eigen::MatrixXd mat;
  OpTag tag;
  BoundaryPtr source;
  BoundaryPtr target;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

OperatorMatrix assemble_V(BoundaryPtr b);
OperatorMatrix assemble_W(BoundaryPtr b);
OperatorMatrix assemble_Wstar(BoundaryPtr b);

// kind must be one of the Cross* tags. Requires the two curves to be
// disjoint with clearance > 1e-3 * max(diameters).
OperatorMatrix assemble_cross(BoundaryPtr source, BoundaryPtr target, OpTag kind);

// LU-backed solver for (1/2 I + A) with A a (adjoint) double-layer matrix.
// Solves verify a residual bound of 1e-10 * max(1, |rhs|_inf).
class HalfPlusSolver {
 public:
  explicit HalfPlusSolver(const OperatorMatrix& op);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve_matrix(const Eigen::MatrixXd& rhs) const;
  const Eigen::MatrixXd& half_plus() const { return half_plus_; }
  const BoundaryPtr& boundary() const { return boundary_; }

 private:
  Eigen::MatrixXd half_plus_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  BoundaryPtr boundary_;
};

// J = (1/2 I + W*_inner) - DnW (1/2 I + W_outer)^{-1} V_cross, the Schur-type
// operator coupling the inner single-layer density to the outer problem.
// Blocks: v_cross traces the inner single layer on the outer curve, dnw takes
// the inner normal derivative of the outer double layer.
OperatorMatrix assemble_J(const HalfPlusSolver& half_w_outer, const OperatorMatrix& v_cross,
                          const OperatorMatrix& dnw, const OperatorMatrix& wstar_inner);
OperatorMatrix assemble_J(BoundaryPtr outer, BoundaryPtr inner);

// J_lambda: same shape with both W* and the correction scaled by
// (lambda - 1) / (lambda + 1). lambda must be positive and != 1 is allowed;
// lambda == 1 gives exactly 1/2 I.
OperatorMatrix assemble_J_lambda(const HalfPlusSolver& half_w_outer, const OperatorMatrix& v_cross,
                                 const OperatorMatrix& dnw, const OperatorMatrix& wstar_inner,
                                 double lambda);
OperatorMatrix assemble_J_lambda(BoundaryPtr outer, BoundaryPtr inner, double lambda);

// Equilibrium density of the curve: the bordered system
//   V psi_hat = c 1,  mean(psi_hat) = 1
// solved by dense LU; psi is reported rescaled to unit weighted sum
// (integral one), c as solved. |c| ~ 0 flags unit logarithmic capacity,
// where the single-layer operator is degenerate.
struct EquilibriumDensity {
  Eigen::VectorXd psi;
  double c = 0.0;
};
EquilibriumDensity equilibrium_density(const DiscreteBoundary& b);

double smallest_singular_value(const Eigen::MatrixXd& m);
double largest_singular_value(const Eigen::MatrixXd& m);

}  // namespace annulus
