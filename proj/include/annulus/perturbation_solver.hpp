#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "annulus/boundary_ops.hpp"
#include "annulus/nonlinearity.hpp"
#include "annulus/potentials.hpp"
#include "annulus/transmission_solver.hpp"

namespace annulus {

// Unknowns of the perturbed formulation: one double-layer density on the
// outer curve and two single-layer densities on the inner curve. The outer
// field uses eta_o, the inner field uses eta_i; they coincide at eps = 0.
struct PerturbState {
  Eigen::VectorXd mu_o;   // double-layer density on the outer curve
  Eigen::VectorXd eta_o;  // single-layer density on the inner curve (outer side)
  Eigen::VectorXd eta_i;  // single-layer density on the inner curve (inner side)

  double sup_norm() const;
};

// One accepted solution along the continuation branch.
struct BranchPoint {
  double eps = 0.0;
  PerturbState state;
  int iterations = 0;      // Newton corrections used
  double residual = 0.0;   // sup-norm of the residual at acceptance
  double sigma_min = 0.0;  // smallest singular value of the Jacobian there
};

struct NewtonOptions {
  double tolerance = 1e-10;  // sup-norm of the residual
  int max_iterations = 25;
  double state_cap = 1e8;  // iterate sup-norm beyond which we declare divergence
};

// Picard iteration report for the eps = 0 startup solve.
struct PicardReport {
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
  std::string diagnostic;
};

struct ContinuationOptions {
  double eps_start = 0.0;
  double eps_end = 1.0;
  double initial_step = 0.1;
  // Epsilon values the stepper must land on exactly (interior samples).
  std::vector<double> must_hit;
  // Fold declaration: the step has shrunk below fold_step_fraction * initial
  // and the smallest singular value at the last accepted point is either
  // below fold_sigma outright or has collapsed to less than
  // fold_sigma_collapse times its value at the first accepted point.
  double fold_step_fraction = 1e-4;
  double fold_sigma = 1e-4;
  double fold_sigma_collapse = 0.05;
  int max_steps = 2000;
  NewtonOptions newton;
  // Reject a corrector result that lands too far from its predictor
  // (guards against silently switching solution branches).
  double jump_guard = 0.5;
  // Central-difference Jacobian audit along one random direction at every
  // accepted point; the worst relative mismatch is reported.
  bool fd_spot_check = true;
  unsigned rng_seed = 0x5eedu;
};

struct ContinuationResult {
  std::vector<BranchPoint> points;  // all accepted points, eps-ordered
  bool reached_end = false;
  bool fold_detected = false;
  double fold_eps = 0.0;     // eps of the last accepted point when folding
  double final_step = 0.0;   // step magnitude when the walk stopped
  double sigma_first = 0.0;  // smallest singular value at the first point
  double sigma_last = 0.0;   // ... and at the last accepted point
  double fd_check_max = 0.0; // worst Jacobian/finite-difference mismatch
  double gamma_tilde_min = 0.0;  // most negative flux-response slope seen
  std::vector<std::string> warnings;
  std::string fold_message;
};

// Near-linear transmission problem with interface condition
//   u_o = lambda * u_i + eps * Phi(x, u_i)
// and flux jump G, reduced to a three-density boundary system solved by
// Newton in the state and natural-parameter continuation in eps.
//
// Representation: U_o = W_o[mu_o] + V_i[eta_o] on the annulus,
// U_i = (W_o[mu_o] + V_i[eta_i]) / lambda inside the inner curve; the inner
// trace entering the nonlinearities is U = (A mu_o + V eta_i) / lambda with
// A the outer-to-inner double-layer trace and V the inner single layer.
class PerturbedProblem {
 public:
  PerturbedProblem(BoundaryPtr outer, BoundaryPtr inner, Eigen::VectorXd dirichlet_outer,
                   double lambda, ScalarBC phi, ScalarBC flux_g,
                   TransmissionOptions picard_options = {});

  int outer_size() const { return static_cast<int>(outer_->node_count); }
  int inner_size() const { return static_cast<int>(inner_->node_count); }
  int dof() const { return outer_size() + 2 * inner_size(); }

  Eigen::VectorXd pack(const PerturbState& s) const;
  PerturbState unpack(const Eigen::VectorXd& x) const;
  PerturbState zero_state() const;

  // Trace of the inner solution on the inner curve: (A mu_o + V eta_i) / lambda.
  Eigen::VectorXd inner_trace(const PerturbState& s) const;

  // The three residual components, in state order.
  std::array<Eigen::VectorXd, 3> residual_blocks(double eps, const PerturbState& s) const;
  Eigen::VectorXd residual(double eps, const PerturbState& s) const;
  double residual_norm(double eps, const PerturbState& s) const;

  // Dense Jacobian of the packed residual in the packed state.
  Eigen::MatrixXd jacobian(double eps, const PerturbState& s) const;

  // eps = 0 startup: damped Picard on the single-density fixed-point form,
  // then recovery of mu_o. Requires the flux nonlinearity to pass the
  // sub-linear growth audit. When report is null, non-convergence throws.
  PerturbState solve_epsilon_zero(PicardReport* report = nullptr) const;

  // Approximate state for the rotationally invariant solution with inner
  // value t_i (concentric circles, constant data only): the outer Dirichlet
  // row holds exactly, the nonlinear rows are left to the Newton corrector.
  PerturbState radial_seed(double t_i) const;

  // Newton corrector at fixed eps. Throws LinearAlgebraError ("singular
  // Jacobian (near fold)") or ConvergenceError (max_iter / divergence).
  BranchPoint newton_solve(double eps, const PerturbState& initial,
                           const NewtonOptions& opts = {}) const;

  // Natural-parameter continuation with the previous state as predictor;
  // halves the step on corrector failure. Folding is reported, not thrown.
  // The overload without an initial state starts from solve_epsilon_zero
  // and therefore requires eps_start = 0.
  ContinuationResult continue_in_epsilon(const ContinuationOptions& opts) const;
  ContinuationResult continue_in_epsilon(const ContinuationOptions& opts,
                                         const PerturbState& initial) const;

  // Weighted mean of the inner trace (constant-solution summary value).
  double interior_mean(const PerturbState& s) const;

  // Flux-response slope dG/dt at the current inner trace (sign monitor).
  Eigen::VectorXd gamma_tilde(const PerturbState& s) const;

  // Re-solves at bp.eps from bp.state plus uniform noise of the given
  // magnitude; returns the sup-distance between the re-solved and original
  // packed states (local-uniqueness probe).
  double uniqueness_probe(const BranchPoint& bp, double noise_magnitude, unsigned seed,
                          const NewtonOptions& opts = {}) const;

  // Field values at the given points (annulus and inner region only).
  FieldGrid reconstruct(const PerturbState& s, const std::vector<Vec2>& points,
                        double cutoff_rel = 1e-3) const;

  const DiscreteBoundary& outer() const { return *outer_; }
  const DiscreteBoundary& inner() const { return *inner_; }
  const Eigen::VectorXd& dirichlet_data() const { return f_o_; }
  double lambda() const { return lambda_; }
  const ScalarBC& phi() const { return phi_; }
  const ScalarBC& flux() const { return g_; }
  const OperatorMatrix& coupling() const { return j_lambda_; }
  const EquilibriumDensity& inner_equilibrium() const { return equilibrium_; }

 private:
  Eigen::VectorXd solve_coupling(const Eigen::VectorXd& rhs) const;

  BoundaryPtr outer_;
  BoundaryPtr inner_;
  Eigen::VectorXd f_o_;
  double lambda_ = 1.0;
  ScalarBC phi_;
  ScalarBC g_;
  TransmissionOptions picard_options_;

  OperatorMatrix v_i_;         // single layer on the inner curve
  OperatorMatrix wstar_i_;     // adjoint double layer on the inner curve
  OperatorMatrix w_o_;         // double layer on the outer curve
  OperatorMatrix cross_v_io_;  // inner single layer traced on the outer curve
  OperatorMatrix cross_w_oi_;  // outer double layer traced on the inner curve
  OperatorMatrix dnw_oi_;      // inner normal derivative of the outer double layer
  OperatorMatrix j_lambda_;    // lambda-weighted coupling operator
  std::unique_ptr<HalfPlusSolver> half_w_o_;
  Eigen::MatrixXd half_plus_wstar_;   //  1/2 I + W*_inner
  Eigen::MatrixXd minus_half_wstar_;  // -1/2 I + W*_inner
  Eigen::PartialPivLU<Eigen::MatrixXd> j_lambda_lu_;
  EquilibriumDensity equilibrium_;
};

}  // namespace annulus
