#include "annulus/boundary_ops.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "annulus/errors.hpp"
#include "annulus/parallel.hpp"
#include "annulus/potentials.hpp"

namespace annulus {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_boundary(const OperatorMatrix& op) {
  if (op.source.get() != op.target.get()) throw std::invalid_argument("operator is not a self map");
}

// Quadrature weights R_{|i-j|} for the 2pi-periodic kernel
// log(4 sin^2((s-t)/2)) at N equispaced nodes (N = 2n):
//   R_d = -(2 pi / n) sum_{m=1}^{n-1} cos(m pi d / n) / m - (pi / n^2) (-1)^d
// Exact on trigonometric polynomials of degree < n.
std::vector<double> log_kernel_weights(int node_count) {
  const int n = node_count / 2;
  std::vector<double> r(node_count);
  for (int d = 0; d < node_count; ++d) {
    double acc = 0.0;
    const double t = kPi * d / n;
    for (int m = 1; m < n; ++m) acc += std::cos(m * t) / m;
    r[d] = -kTwoPi / n * acc - kPi / (n * n) * (d % 2 == 0 ? 1.0 : -1.0);
  }
  return r;
}
}  // namespace

Eigen::VectorXd OperatorMatrix::apply(const Eigen::VectorXd& v) const {
  if (v.size() != mat.cols()) throw std::invalid_argument("density length != operator columns");
  return mat * v;
}

// Single layer on the curve itself. The kernel
//   (1/2pi) log|x(s)-x(t)| |x'(t)|
// splits into A(s,t) log(4 sin^2((s-t)/2)) + B(s,t) with
//   A = |x'(t)| / 4pi,
//   B = (1/4pi) log( |x(s)-x(t)|^2 / (4 sin^2((s-t)/2)) ) |x'(t)|,
// and B(s,s) = (1/2pi) log|x'(s)| |x'(s)|. A gets the exact trigonometric
// weights, B the plain trapezoid rule.
OperatorMatrix assemble_V(BoundaryPtr b) {
  const int n = b->node_count;
  const std::vector<double> r = log_kernel_weights(n);
  const double h = kTwoPi / n;
  Eigen::MatrixXd m(n, n);
  parallel_rows(n, [&](int i) {
    for (int j = 0; j < n; ++j) {
      const double a = b->speed[j] / (4.0 * kPi);
      double bb;
      if (i == j) {
        bb = std::log(b->speed[j]) * b->speed[j] / kTwoPi;
      } else {
        const double dist2 = (b->node[i] - b->node[j]).squared_norm();
        const double sn = std::sin(0.5 * (b->param[i] - b->param[j]));
        bb = std::log(dist2 / (4.0 * sn * sn)) * b->speed[j] / (4.0 * kPi);
      }
      const int d = std::abs(i - j);
      m(i, j) = r[d] * a + h * bb;
    }
  });
  return {std::move(m), OpTag::SingleLayer, b, b};
}

// Double layer. Continuous kernel
//   -nu(t) . (x(s)-x(t)) / (2pi |x(s)-x(t)|^2) |x'(t)|
// with diagonal limit kappa(s) |x'(s)| / 4pi; trapezoid rule.
OperatorMatrix assemble_W(BoundaryPtr b) {
  const int n = b->node_count;
  const double h = kTwoPi / n;
  Eigen::MatrixXd m(n, n);
  parallel_rows(n, [&](int i) {
    for (int j = 0; j < n; ++j) {
      double k;
      if (i == j) {
        k = b->curvature[j] * b->speed[j] / (4.0 * kPi);
      } else {
        const Vec2 z = b->node[i] - b->node[j];
        k = -b->normal[j].dot(z) / (kTwoPi * z.squared_norm()) * b->speed[j];
      }
      m(i, j) = h * k;
    }
  });
  return {std::move(m), OpTag::DoubleLayer, b, b};
}

// Adjoint double layer: kernel nu(s) . (x(s)-x(t)) / (2pi |x(s)-x(t)|^2) |x'(t)|,
// same diagonal limit. Weighted-adjoint to W exactly at the discrete level.
OperatorMatrix assemble_Wstar(BoundaryPtr b) {
  const int n = b->node_count;
  const double h = kTwoPi / n;
  Eigen::MatrixXd m(n, n);
  parallel_rows(n, [&](int i) {
    for (int j = 0; j < n; ++j) {
      double k;
      if (i == j) {
        k = b->curvature[j] * b->speed[j] / (4.0 * kPi);
      } else {
        const Vec2 z = b->node[i] - b->node[j];
        k = b->normal[i].dot(z) / (kTwoPi * z.squared_norm()) * b->speed[j];
      }
      m(i, j) = h * k;
    }
  });
  return {std::move(m), OpTag::AdjointDouble, b, b};
}

OperatorMatrix assemble_cross(BoundaryPtr source, BoundaryPtr target, OpTag kind) {
  if (source->curve.get() == target->curve.get()) {
    throw std::invalid_argument("cross operator requires distinct curves");
  }
  const double clearance = containment_clearance(*source->curve, *target->curve);
  if (!(clearance > 1e-3 * std::max(source->diameter(), target->diameter()))) {
    throw GeometryError("curves too close for plain cross-boundary quadrature");
  }
  const int rows = target->node_count;
  const int cols = source->node_count;
  Eigen::MatrixXd m(rows, cols);
  switch (kind) {
    case OpTag::CrossSingle:
      parallel_rows(rows, [&](int i) {
        for (int j = 0; j < cols; ++j) {
          m(i, j) = fundamental_solution(target->node[i] - source->node[j]) * source->weight[j];
        }
      });
      break;
    case OpTag::CrossDouble:
      parallel_rows(rows, [&](int i) {
        for (int j = 0; j < cols; ++j) {
          const Vec2 z = target->node[i] - source->node[j];
          m(i, j) = -source->normal[j].dot(grad_fundamental_solution(z)) * source->weight[j];
        }
      });
      break;
    case OpTag::CrossNormalDeriv:
      // nu_target . grad of the source double layer; Hessian of the
      // fundamental solution H(z) v = (v |z|^2 - 2 (z.v) z) / (2pi |z|^4).
      parallel_rows(rows, [&](int i) {
        for (int j = 0; j < cols; ++j) {
          const Vec2 z = target->node[i] - source->node[j];
          const double r2 = z.squared_norm();
          const Vec2 nj = source->normal[j];
          const Vec2 hn = (nj * r2 - z * (2.0 * z.dot(nj))) * (1.0 / (kTwoPi * r2 * r2));
          m(i, j) = -target->normal[i].dot(hn) * source->weight[j];
        }
      });
      break;
    default:
      throw std::invalid_argument("assemble_cross expects a Cross* tag");
  }
  return {std::move(m), kind, source, target};
}

HalfPlusSolver::HalfPlusSolver(const OperatorMatrix& op) {
  require_same_boundary(op);
  if (op.tag != OpTag::DoubleLayer && op.tag != OpTag::AdjointDouble) {
    throw std::invalid_argument("HalfPlusSolver expects a (adjoint) double-layer matrix");
  }
  boundary_ = op.target;
  half_plus_ = op.mat;
  half_plus_.diagonal().array() += 0.5;
  lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(half_plus_);
}

Eigen::VectorXd HalfPlusSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != half_plus_.rows()) throw std::invalid_argument("rhs length != operator size");
  Eigen::VectorXd x = lu_.solve(rhs);
  const double res = (half_plus_ * x - rhs).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  if (!(res <= 1e-10 * scale)) {
    std::ostringstream msg;
    msg << "half-plus solve residual " << res << " exceeds 1e-10 * " << scale
        << "; operator is singular to tolerance";
    throw LinearAlgebraError(msg.str());
  }
  return x;
}

Eigen::MatrixXd HalfPlusSolver::solve_matrix(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != half_plus_.rows()) throw std::invalid_argument("rhs rows != operator size");
  return lu_.solve(rhs);
}

OperatorMatrix assemble_J(const HalfPlusSolver& half_w_outer, const OperatorMatrix& v_cross,
                          const OperatorMatrix& dnw, const OperatorMatrix& wstar_inner) {
  require_same_boundary(wstar_inner);
  Eigen::MatrixXd j = wstar_inner.mat;
  j.diagonal().array() += 0.5;
  j.noalias() -= dnw.mat * half_w_outer.solve_matrix(v_cross.mat);
  return {std::move(j), OpTag::CompositeJ, wstar_inner.source, wstar_inner.target};
}

OperatorMatrix assemble_J(BoundaryPtr outer, BoundaryPtr inner) {
  const HalfPlusSolver half_w_outer(assemble_W(outer));
  return assemble_J(half_w_outer, assemble_cross(inner, outer, OpTag::CrossSingle),
                    assemble_cross(outer, inner, OpTag::CrossNormalDeriv), assemble_Wstar(inner));
}

OperatorMatrix assemble_J_lambda(const HalfPlusSolver& half_w_outer, const OperatorMatrix& v_cross,
                                 const OperatorMatrix& dnw, const OperatorMatrix& wstar_inner,
                                 double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  require_same_boundary(wstar_inner);
  const double beta = (lambda - 1.0) / (lambda + 1.0);
  Eigen::MatrixXd j = beta * wstar_inner.mat;
  j.diagonal().array() += 0.5;
  j.noalias() -= beta * (dnw.mat * half_w_outer.solve_matrix(v_cross.mat));
  return {std::move(j), OpTag::CompositeJLambda, wstar_inner.source, wstar_inner.target};
}

OperatorMatrix assemble_J_lambda(BoundaryPtr outer, BoundaryPtr inner, double lambda) {
  const HalfPlusSolver half_w_outer(assemble_W(outer));
  return assemble_J_lambda(half_w_outer, assemble_cross(inner, outer, OpTag::CrossSingle),
                           assemble_cross(outer, inner, OpTag::CrossNormalDeriv),
                           assemble_Wstar(inner), lambda);
}

EquilibriumDensity equilibrium_density(const DiscreteBoundary& b) {
  const int n = b.node_count;
  auto bp = std::make_shared<const DiscreteBoundary>(b);
  const OperatorMatrix v = assemble_V(bp);
  const double perimeter = b.perimeter();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + 1, n + 1);
  sys.topLeftCorner(n, n) = v.mat;
  sys.topRightCorner(n, 1).setConstant(-1.0);
  for (int j = 0; j < n; ++j) sys(n, j) = b.weight[j];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = perimeter;  // mean-one normalization of the solved density
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  Eigen::VectorXd sol = lu.solve(rhs);
  const double res = (sys * sol - rhs).lpNorm<Eigen::Infinity>();
  if (!(res <= 1e-8 * std::max(1.0, perimeter))) {
    throw LinearAlgebraError("bordered equilibrium system is singular to tolerance");
  }
  EquilibriumDensity eq;
  eq.psi = sol.head(n) / perimeter;  // reported with unit integral
  eq.c = sol[n];
  return eq;
}

double smallest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().tail(1)[0];
}

double largest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

}  // namespace annulus
