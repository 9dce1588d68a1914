#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lcamr/physics.hpp"

namespace lcamr {

/// Element-wise estimator pieces. theta[T]^2 = interior[T] + jump[T]
/// (+ constraint[T] for the Lagrangian form); the jump integral of every
/// interior facet enters both adjacent elements' sums.
struct ElementEstimates {
  std::vector<double> theta;
  std::vector<double> interior;    // h_T^2 ||r||_{0,T}^2
  std::vector<double> jump;        // sum_E h_E ||[j]||_{0,E}^2
  std::vector<double> constraint;  // ||n.n - 1||_{0,T}^2 (Lagrangian only)
  double global_estimate = 0.0;    // sqrt(sum theta^2)
};

/// Strong residual of the optimality system at one reference point: the
/// elementwise integration-by-parts form with the penalty or multiplier tail.
Eigen::Vector3d strong_residual(const DirectorState& state,
                                const ProblemConfig& cfg, int elem,
                                const Eigen::Vector2d& ref);

/// Flux jump K1 (div n) eta + K3 (Z curl n) x eta across an interior facet,
/// evaluated at the 4-point edge rule; the fixed facet normal is used from
/// both sides, so the sign flips with the normal. Throws on boundary edges.
std::vector<Eigen::Vector3d> edge_jump(const DirectorState& state,
                                       const ProblemConfig& cfg, int edge);
std::vector<Eigen::Vector3d> edge_jump(const DirectorState& state,
                                       const ProblemConfig& cfg, int edge,
                                       const Eigen::Vector2d& normal);

ElementEstimates estimate(const DirectorState& state, const ProblemConfig& cfg);

/// Same estimator evaluated on a closed-form field (multiplier treated as
/// zero for the Lagrangian form). Used by manufactured-solution checks.
ElementEstimates estimate_analytic(const AnalyticField& field,
                                   const ProblemConfig& cfg, const Mesh& mesh);
Eigen::Vector3d strong_residual_analytic(const AnalyticField& field,
                                         const ProblemConfig& cfg,
                                         const Eigen::Vector2d& xphys);

}  // namespace lcamr
