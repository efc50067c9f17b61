#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "annulus/boundary_ops.hpp"
#include "annulus/geometry.hpp"
#include "annulus/nonlinearity.hpp"
#include "annulus/potentials.hpp"

namespace annulus {

// Triple of layer densities: mu_o (double layer, outer boundary),
// mu (double layer, inner boundary), eta (single layer, inner boundary).
struct DensityState {
  Eigen::VectorXd mu_o;
  Eigen::VectorXd mu;
  Eigen::VectorXd eta;

  double sup_norm() const;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double damping = 0.0;
  double tolerance = 0.0;
  std::array<double, 3> final_residual{0.0, 0.0, 0.0};
  // max-component residual per iteration, in order.
  std::vector<double> residual_history;
  std::string diagnostic;
};

struct TransmissionOptions {
  double damping = 0.5;          // Picard relaxation factor in (0, 1]
  double tolerance = 1e-9;       // sup-norm fixed-point residual target
  int max_iterations = 500;
  double state_cap = 1e6;        // abort when any density exceeds this
  int stall_window = 50;         // abort when best residual stops improving
  double invert_t_max = 1e3;     // bracket half-width for pointwise inversion
};

// Compactly supported radial test function phi(x) = scale * (1 - u)^power
// with u = |x - center|^2 / radius^2, extended by zero outside the disk.
struct RadialBump {
  Vec2 center{0.0, 0.0};
  double radius = 1.0;
  int power = 3;     // >= 2 so the gradient is continuous at the edge
  double scale = 1.0;

  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  double laplacian(Vec2 x) const;
};

struct WeakPairingOptions {
  int radial_nodes = 64;    // Gauss-Legendre nodes per ray segment
  int angular_nodes = 256;  // equispaced rays around the bump centre
};

struct WeakPairingResult {
  double lhs = 0.0;            // boundary_term + volume_term
  double rhs = 0.0;            // quadrature of G(s, u_i) * phi over the interface
  double boundary_term = 0.0;  // jump of the trace against the normal flux of phi
  double volume_term = 0.0;    // integral of u * laplacian(phi) over the support
};

// Nonlinear transmission problem on an annular two-phase domain,
// reduced to boundary densities on the two curves. The interior state
// u_i is harmonic inside the inner curve, u_o harmonic in the annulus
// with Dirichlet data f_o on the outer curve, coupled across the inner
// curve by u_o = F(x, u_i) (with t -> t + F(x, t) injective) and by the
// flux jump nu.grad(u_o - u_i) = G(x, u_i).
class TransmissionProblem {
 public:
  TransmissionProblem(BoundaryPtr outer, BoundaryPtr inner,
                      Eigen::VectorXd dirichlet_outer, ScalarBC transmission_F,
                      ScalarBC flux_G, TransmissionOptions options = {});

  const DiscreteBoundary& outer() const { return *outer_; }
  const DiscreteBoundary& inner() const { return *inner_; }
  const Eigen::VectorXd& dirichlet_data() const { return f_o_; }
  const ScalarBC& transmission_term() const { return F_; }
  const ScalarBC& flux_term() const { return G_; }
  const TransmissionOptions& options() const { return options_; }

  // One application of the fixed-point map; the state is a fixed point
  // of this map exactly when the densities solve the coupled problem.
  DensityState apply_map(const DensityState& state) const;

  // Components of ||state - apply_map(state)||_inf per density.
  std::array<double, 3> residuals(const DensityState& state) const;

  // Damped Picard iteration from the given initial state.
  std::pair<DensityState, SolveReport> solve(const DensityState& initial) const;

  DensityState zero_state() const;

  // Exact state of the concentric radial configuration whose interior
  // value is t_i. Requires concentric circles, constant Dirichlet data,
  // and parameter-independent coefficients.
  DensityState radial_seed(double t_i) const;

  // Dirichlet traces recovered from the densities via the jump relations.
  Eigen::VectorXd trace_u_i(const DensityState& state) const;
  Eigen::VectorXd trace_u_o_inner(const DensityState& state) const;
  Eigen::VectorXd trace_u_o_outer(const DensityState& state) const;

  // Weighted mean of the interior trace (the constant value in the
  // radial configuration).
  double interior_mean(const DensityState& state) const;

  // Field evaluation away from both curves (beyond cutoff_rel times the
  // outer diameter). Throws NearFieldError for points inside the band
  // and std::domain_error for points outside the outer curve.
  FieldGrid reconstruct(const DensityState& state,
                        const std::vector<Vec2>& points,
                        double cutoff_rel = 1e-3) const;

  // Recover the densities from the Dirichlet traces of the fields the
  // state represents; a representation-consistent state reproduces itself.
  DensityState re_extract(const DensityState& state) const;

  // Distributional flux-jump identity tested against one bump function:
  //   int (u_o - u_i) dphi/dnu dsigma + int u laplacian(phi) dx
  //     = int G(s, u_i) phi dsigma.
  WeakPairingResult weak_flux_pairing(const DensityState& state,
                                      const RadialBump& bump,
                                      WeakPairingOptions quad = {}) const;

  // Operator access for diagnostics and tests.
  const OperatorMatrix& single_inner() const { return v_i_; }
  const OperatorMatrix& double_inner() const { return w_i_; }
  const OperatorMatrix& adjoint_inner() const { return wstar_i_; }
  const OperatorMatrix& double_outer() const { return w_o_; }
  const OperatorMatrix& cross_single() const { return cross_v_io_; }
  const OperatorMatrix& cross_double_to_outer() const { return cross_w_io_; }
  const OperatorMatrix& cross_double_to_inner() const { return cross_w_oi_; }
  const OperatorMatrix& cross_normal_deriv() const { return dnw_oi_; }
  const OperatorMatrix& coupling() const { return j_; }

  Eigen::VectorXd solve_coupling(const Eigen::VectorXd& rhs) const;

 private:
  BoundaryPtr outer_;
  BoundaryPtr inner_;
  Eigen::VectorXd f_o_;
  ScalarBC F_;
  ScalarBC G_;
  TransmissionOptions options_;

  OperatorMatrix v_i_;
  OperatorMatrix w_i_;
  OperatorMatrix wstar_i_;
  OperatorMatrix w_o_;
  OperatorMatrix cross_v_io_;
  OperatorMatrix cross_w_io_;
  OperatorMatrix cross_w_oi_;
  OperatorMatrix dnw_oi_;
  OperatorMatrix j_;

  std::unique_ptr<HalfPlusSolver> half_w_o_;
  std::unique_ptr<HalfPlusSolver> half_w_i_;
  Eigen::PartialPivLU<Eigen::MatrixXd> j_lu_;
  mutable std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> v_i_lu_;
};

}  // namespace annulus
