#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "lcamr/mesh.hpp"
#include "lcamr/shapes.hpp"

namespace lcamr {

/// Q2 discretization for the three director components plus an optional Q1
/// multiplier field, with a deterministic global dof enumeration:
/// Q2 scalar dofs are vertices, then side entities sorted by vertex pair,
/// then cells; director dofs are component-major (dof = comp*N + scalar);
/// multiplier dofs follow after the director block.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, bool with_multiplier);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  bool has_multiplier() const { return multiplier_; }

  int n_q2_scalar() const { return n_q2_; }
  int n_q1_scalar() const { return mesh_->n_vertices(); }
  int n_director_dofs() const { return 3 * n_q2_; }
  int n_total_dofs() const {
    return n_director_dofs() + (multiplier_ ? n_q1_scalar() : 0);
  }

  int q2_dof(int elem, int local) const { return q2_dofs_[elem][local]; }
  int q1_dof(int elem, int local) const {
    return mesh_->elements[elem].v[local];
  }
  int director_dof(int comp, int scalar) const { return comp * n_q2_ + scalar; }
  int multiplier_dof(int scalar) const { return 3 * n_q2_ + scalar; }

  const Eigen::Vector2d& q2_node_position(int scalar) const {
    return q2_pos_[scalar];
  }
  bool q2_node_on_boundary(int scalar) const { return q2_boundary_[scalar]; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  bool multiplier_;
  int n_q2_ = 0;
  std::vector<std::array<int, 9>> q2_dofs_;
  std::vector<Eigen::Vector2d> q2_pos_;
  std::vector<bool> q2_boundary_;
};

/// Affine constraints dof -> sum(w_i * master_i) + inhomogeneity, covering
/// Dirichlet values and hanging-node interpolation. After close() no master
/// is itself constrained.
class ConstraintSet {
 public:
  struct Line {
    std::vector<std::pair<int, double>> terms;
    double inhomogeneity = 0.0;
  };

  explicit ConstraintSet(int n_dofs) : lines_(n_dofs) {}

  int n_dofs() const { return static_cast<int>(lines_.size()); }
  bool is_constrained(int dof) const { return lines_[dof].has_value(); }
  const Line& line(int dof) const { return *lines_[dof]; }
  int n_constraints() const { return n_constraints_; }

  void add_line(int dof, std::vector<std::pair<int, double>> terms,
                double inhomogeneity);
  void close();

  /// Sets every constrained entry from its masters (with inhomogeneity).
  void distribute(Eigen::VectorXd& u) const;
  /// Same without inhomogeneities; used for Newton updates.
  void distribute_homogeneous(Eigen::VectorXd& du) const;

  /// Constraint-eliminating local-to-global scatter. Constrained rows and
  /// columns are redirected onto their masters; Dirichlet rows vanish.
  void add_local_matrix(const std::vector<int>& dofs,
                        const Eigen::MatrixXd& local,
                        std::vector<Eigen::Triplet<double>>& out) const;
  void add_local_vector(const std::vector<int>& dofs,
                        const Eigen::VectorXd& local,
                        Eigen::VectorXd& out) const;
  /// Appends the identity diagonal for constrained dofs so the assembled
  /// matrix stays invertible with delta = 0 on constrained rows.
  void append_identity_tail(std::vector<Eigen::Triplet<double>>& out) const;

 private:
  std::vector<std::optional<Line>> lines_;
  int n_constraints_ = 0;
  bool closed_ = false;
};

/// Dirichlet rows for all director components on boundary Q2 nodes (nodal
/// interpolation of g, evaluated through the boundary projection) plus
/// hanging-node rows for Q2 and, when present, Q1 dofs.
ConstraintSet build_constraints(
    const FeSpace& space,
    const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& g);

struct DirectorState {
  std::shared_ptr<const FeSpace> space;
  Eigen::VectorXd coeffs;  // director block then multiplier block

  /// The stored multiplier coefficients carry a factor 1/2 relative to the
  /// physical multiplier field: lambda_phys = 2 * interpolated(coeffs).
  /// This makes the optimality system the exact half-gradient of the
  /// Lagrangian in the stored variables, so its Jacobian is symmetric.
  Eigen::Vector3d director_at(int elem, const Eigen::Vector2d& ref) const;
  double multiplier_coeff_at(int elem, const Eigen::Vector2d& ref) const;
  double multiplier_at(int elem, const Eigen::Vector2d& ref) const {
    return 2.0 * multiplier_coeff_at(elem, ref);
  }
};

DirectorState make_state(std::shared_ptr<const FeSpace> space);

/// Nodal interpolation of a 3-component field into the Q2 director block.
DirectorState interpolate(
    std::shared_ptr<const FeSpace> space,
    const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& field);

/// Evaluates the coarse finite-element function at the fine nodal points via
/// the parent/child reference maps. Throws NotNestedError unless the fine
/// space's mesh was produced by refining the coarse state's mesh.
DirectorState transfer(const DirectorState& coarse,
                       std::shared_ptr<const FeSpace> fine_space);

}  // namespace lcamr
