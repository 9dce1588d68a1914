#pragma once

// Test-only reference computations kept independent of the code paths they
// check: geometric scans, finite differences, dense linear algebra, scalar
// functionals evaluated by direct quadrature.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "lcamr/fe.hpp"
#include "lcamr/physics.hpp"
#include "lcamr/quadrature.hpp"

namespace oracle {

// Brute-force scan: counts vertices lying strictly inside each element side.
// The 2:1 balance invariant requires at most one everywhere.
inline int max_hanging_per_side(const lcamr::Mesh& mesh) {
  int worst = 0;
  for (const lcamr::Element& el : mesh.elements) {
    for (int s = 0; s < 4; ++s) {
      const Eigen::Vector2d a = mesh.vertices[el.v[s]];
      const Eigen::Vector2d b = mesh.vertices[el.v[(s + 1) % 4]];
      const Eigen::Vector2d d = b - a;
      const double len2 = d.squaredNorm();
      int inside = 0;
      for (const auto& p : mesh.vertices) {
        const Eigen::Vector2d r = p - a;
        const double cross = r.x() * d.y() - r.y() * d.x();
        if (std::abs(cross) > 1e-12 * std::sqrt(len2)) continue;
        const double t = r.dot(d) / len2;
        if (t > 1e-9 && t < 1.0 - 1e-9) ++inside;
      }
      worst = std::max(worst, inside);
    }
  }
  return worst;
}

// Newton inversion of the bilinear element map; used by finite-difference
// oracles that need physical-point evaluations on skewed cells.
inline Eigen::Vector2d invert_map(const lcamr::Mesh& mesh, int elem,
                                  const Eigen::Vector2d& x) {
  Eigen::Vector2d ref(0.5, 0.5);
  for (int it = 0; it < 50; ++it) {
    const auto s = lcamr::shape_eval(lcamr::ElementKind::Q1, ref);
    const auto C = mesh.corners(elem);
    const Eigen::Vector2d r = C * s.N - x;
    if (r.norm() < 1e-14) break;
    const Eigen::Matrix2d J = C * s.grad;
    ref -= J.inverse() * r;
    ref = ref.cwiseMax(0.0).cwiseMin(1.0);
  }
  return ref;
}

// Penalty scalar functional H = G + zeta * ||n.n - 1||^2 by direct
// quadrature; the finite-difference residual oracle differentiates this.
inline double penalty_functional(const lcamr::DirectorState& state,
                                 const lcamr::ProblemConfig& cfg,
                                 int quad_order = 4) {
  const lcamr::Mesh& mesh = state.space->mesh();
  const lcamr::QuadratureRule rule = lcamr::quadrature(quad_order);
  const double kap = cfg.kappa();
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const auto b = lcamr::detail::basis_at(mesh, e, rule.points[q], false);
      const auto f = lcamr::detail::field_at(state, e, b, false);
      const double div = f.grad(0, 0) + f.grad(1, 1);
      const Eigen::Vector3d curl(f.grad(2, 1), -f.grad(2, 0),
                                 f.grad(1, 0) - f.grad(0, 1));
      const double nc = f.n.dot(curl);
      const double nn1 = f.n.squaredNorm() - 1.0;
      acc += rule.weights[q] * b.detJ *
             (cfg.K1 * div * div +
              cfg.K3 * (curl.squaredNorm() - (1 - kap) * nc * nc) +
              2.0 * cfg.K2 * cfg.t0 * nc + cfg.zeta * nn1 * nn1);
    }
  }
  return acc;
}

// Lagrangian scalar L = G + integral lambda (n.n - 1), with the physical
// multiplier reconstructed from the stored coefficients (lambda = 2 coeff).
inline double lagrangian_functional(const lcamr::DirectorState& state,
                                    const lcamr::ProblemConfig& cfg,
                                    int quad_order = 4) {
  const lcamr::Mesh& mesh = state.space->mesh();
  const lcamr::QuadratureRule rule = lcamr::quadrature(quad_order);
  const double kap = cfg.kappa();
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const auto b = lcamr::detail::basis_at(mesh, e, rule.points[q], false);
      const auto f = lcamr::detail::field_at(state, e, b, false);
      const double div = f.grad(0, 0) + f.grad(1, 1);
      const Eigen::Vector3d curl(f.grad(2, 1), -f.grad(2, 0),
                                 f.grad(1, 0) - f.grad(0, 1));
      const double nc = f.n.dot(curl);
      const double nn1 = f.n.squaredNorm() - 1.0;
      const double lam = state.multiplier_at(e, rule.points[q]);
      acc += rule.weights[q] * b.detJ *
             (cfg.K1 * div * div +
              cfg.K3 * (curl.squaredNorm() - (1 - kap) * nc * nc) +
              2.0 * cfg.K2 * cfg.t0 * nc + lam * nn1);
    }
  }
  return acc;
}

inline std::vector<int> free_dofs(const lcamr::ConstraintSet& cs) {
  std::vector<int> out;
  for (int d = 0; d < cs.n_dofs(); ++d)
    if (!cs.is_constrained(d)) out.push_back(d);
  return out;
}

}  // namespace oracle
