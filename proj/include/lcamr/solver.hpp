#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lcamr/estimator.hpp"
#include "lcamr/physics.hpp"

namespace lcamr {

struct LevelRecord {
  int level = 0;  // 0-based
  int n_elements = 0;
  int dofs = 0;
  int newton_iterations = 0;
  double final_residual = 0.0;
  double alpha = 1.0;
  std::int64_t hessian_nnz = 0;
  int residual_increases = 0;  // monitored only; damped Newton may wobble
  EnergyRecord energy;
  DeviationReport deviation;
  double global_estimate = 0.0;
  double theta_max = 0.0;
  double wall_time_seconds = 0.0;
};

struct SolveStats {
  std::vector<LevelRecord> levels;
  double total_wall_time = 0.0;

  std::int64_t finest_nnz() const {
    return levels.empty() ? 0 : levels.back().hessian_nnz;
  }
  int finest_dofs() const { return levels.empty() ? 0 : levels.back().dofs; }
};

/// WU = sum over Newton steps of step nnz / divisor. The divisor defaults to
/// the finest grid's Hessian nnz; paired uniform-vs-adaptive comparisons pass
/// the adaptive run's finest nnz instead.
double work_units(const SolveStats& stats,
                  std::optional<std::int64_t> divisor_nnz = std::nullopt);

/// Direct sparse LU solve; verifies ||Jx - rhs|| <= 1e-10 ||rhs||.
Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& J,
                             const Eigen::VectorXd& rhs);

struct NewtonResult {
  DirectorState state;
  int iterations = 0;
  double final_residual = 0.0;
  std::int64_t hessian_nnz = 0;
  int residual_increases = 0;
  std::vector<double> residual_history;  // includes the entry residual
};

/// Damped Newton: u <- u + alpha * delta with J delta = -residual, stopping on
/// the Euclidean norm of the free-dof residual. Assembles the Hessian once
/// even when entering converged, so nonzero counts are always recorded.
NewtonResult newton_solve(DirectorState state, const ProblemConfig& cfg,
                          const ConstraintSet& constraints, double alpha);

enum class RefinementMode { adaptive, uniform };

/// Boundary-compatible starting guess on the coarsest grid: a transfinite
/// blend of g pulled into the interior (radial extension on curved domains),
/// normalized to unit length at the nodes, multiplier zero.
DirectorState initial_state(
    std::shared_ptr<const FeSpace> space,
    const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& g,
    const ConstraintSet& constraints);

/// Called once per level after the solve, before refinement. `flags` is empty
/// on the last level.
using LevelCallback =
    std::function<void(int level, const DirectorState&, const ElementEstimates&,
                       const std::vector<bool>& flags)>;

struct NestedIterationResult {
  DirectorState state;
  SolveStats stats;
};

/// Algorithm: solve on the current grid, estimate, flag (adaptive) or flag
/// everything (uniform), refine with hanging-node closure, transfer, project
/// boundary values, bump the damping, repeat for `levels` grids.
NestedIterationResult nested_iteration(
    const ProblemConfig& cfg, std::shared_ptr<const Mesh> coarse,
    const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& g,
    int levels, RefinementMode mode, const LevelCallback& callback = {});

/// Newton/linear failure annotated with its nested-iteration level; keeps the
/// statistics gathered so far so callers can emit partial outputs.
struct NestedIterationError : std::runtime_error {
  int level;
  SolveStats partial;
  NestedIterationError(const std::string& what, int lvl, SolveStats stats)
      : std::runtime_error(what), level(lvl), partial(std::move(stats)) {}
};

}  // namespace lcamr
