#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>

#include "lcamr/fe.hpp"

namespace lcamr {

enum class Formulation { penalty, lagrangian };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

struct DampingSchedule {
  double alpha0 = 1.0;
  double delta = 0.2;
  double alpha_max = 1.0;
};

struct ProblemConfig {
  double K1 = 1.0, K2 = 1.0, K3 = 1.0;  // dimensionless Frank constants
  double t0 = 0.0;                      // chirality
  double zeta = 1e5;                    // penalty weight
  Formulation formulation = Formulation::penalty;
  double mu = 1e-6;        // length scale [m]
  double K_char = 6.2e-12;  // characteristic Frank constant [N]
  std::string boundary_id;
  DampingSchedule damping;
  double newton_tol = 1e-4;
  int max_newton_iters = 100;
  double flag_fraction = 0.4;

  double kappa() const { return K2 / K3; }
  void validate() const;
};

/// Applies Z(n) = I - (1-kappa) n (x) n to w.
Eigen::Vector3d z_apply(const Eigen::Vector3d& n, double kappa,
                        const Eigen::Vector3d& w);

struct EnergyRecord {
  double G = 0.0;             // rescaled functional
  double G_half = 0.0;        // G / 2
  double constant_term = 0.0; // K2 * t0^2 * |Omega| / 2, reported separately
  double wF() const { return G_half + constant_term; }
};

EnergyRecord energy(const DirectorState& state, const ProblemConfig& cfg);

/// Per-element quadrature mean of the free-energy density (half-scaled
/// convention including the chirality constant).
std::vector<double> energy_density_field(const DirectorState& state,
                                         const ProblemConfig& cfg);

Eigen::VectorXd residual(const DirectorState& state, const ProblemConfig& cfg,
                         const ConstraintSet& constraints);
Eigen::SparseMatrix<double> jacobian(const DirectorState& state,
                                     const ProblemConfig& cfg,
                                     const ConstraintSet& constraints);

Eigen::VectorXd residual_penalty(const DirectorState&, const ProblemConfig&,
                                 const ConstraintSet&);
Eigen::SparseMatrix<double> jacobian_penalty(const DirectorState&,
                                             const ProblemConfig&,
                                             const ConstraintSet&);
Eigen::VectorXd residual_lagrangian(const DirectorState&, const ProblemConfig&,
                                    const ConstraintSet&);
Eigen::SparseMatrix<double> jacobian_lagrangian(const DirectorState&,
                                                const ProblemConfig&,
                                                const ConstraintSet&);

struct DeviationReport {
  double max_dev = 0.0;  // signed max over quadrature points of |n_h| - 1
  double min_dev = 0.0;
};

DeviationReport deviation_report(const DirectorState& state);

/// A smooth reference field given in closed form: value, gradient (rows are
/// components, columns x/y) and per-component spatial Hessians.
struct AnalyticField {
  std::function<Eigen::Vector3d(const Eigen::Vector2d&)> value;
  std::function<Eigen::Matrix<double, 3, 2>(const Eigen::Vector2d&)> gradient;
  std::function<std::array<Eigen::Matrix2d, 3>(const Eigen::Vector2d&)> hessian;
};

double l2_error(const DirectorState& state, const AnalyticField& exact,
                int quad_order = 5);
double h1_error(const DirectorState& state, const AnalyticField& exact,
                int quad_order = 5);

namespace detail {

/// Geometry and Q2/Q1 basis data at one reference point of one element,
/// transformed to physical coordinates (second derivatives on request,
/// including the inverse-map curvature term on non-affine cells).
struct BasisAtPoint {
  Eigen::Vector2d xphys;
  double detJ = 0.0;
  std::array<double, 9> N{};
  std::array<Eigen::Vector2d, 9> dN{};   // physical gradients
  std::array<Eigen::Vector3d, 9> d2N{};  // physical (xx, xy, yy)
  std::array<double, 4> N1{};
  std::array<Eigen::Vector2d, 4> dN1{};
};

BasisAtPoint basis_at(const Mesh& mesh, int elem, const Eigen::Vector2d& ref,
                      bool second_derivatives);

/// Director value/derivatives of a state at a prepared basis point.
struct FieldAtPoint {
  Eigen::Vector3d n;
  Eigen::Matrix<double, 3, 2> grad;            // grad(i,a) = d_a n_i
  std::array<Eigen::Vector3d, 3> hess;         // per component (xx, xy, yy)
};

FieldAtPoint field_at(const DirectorState& state, int elem,
                      const BasisAtPoint& basis, bool second_derivatives);

}  // namespace detail

}  // namespace lcamr
