#pragma once

#include <stdexcept>
#include <string>

namespace annulus {

// Invalid curve, discretization request, or region layout.
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation point violates the near-field cutoff of plain quadrature.
struct NearFieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A dense solve failed its residual check or an operator is singular to tolerance.
struct LinearAlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pointwise inversion of t + F(x,t) failed: no bracket, or multiple roots.
struct NonInvertibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inner boundary has (near-)degenerate logarithmic capacity.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver did not reach tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration document or command-line usage.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace annulus
