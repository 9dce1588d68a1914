#pragma once

#include <stdexcept>
#include <string>

namespace lcamr {

/// Degenerate or inconsistent geometry passed to a mesh builder.
struct InvalidGeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A mesh generator could not reach the requested size; carries what it got.
struct ConstructionError : std::runtime_error {
  int achieved_elements;
  ConstructionError(const std::string& what, int achieved)
      : std::runtime_error(what), achieved_elements(achieved) {}
};

/// Structural or numerical failure of the sparse factorization.
struct LinearSolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Newton iteration hit its cap before the residual tolerance.
struct NonConvergenceError : std::runtime_error {
  double last_residual;
  int iterations;
  NonConvergenceError(const std::string& what, double residual, int iters)
      : std::runtime_error(what), last_residual(residual), iterations(iters) {}
};

/// Transfer between meshes that are not parent/child of each other.
struct NotNestedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lcamr
