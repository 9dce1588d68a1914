#pragma once

#include <Eigen/Dense>

namespace lcamr {

enum class ElementKind { Q1, Q2 };

constexpr int node_count(ElementKind k) { return k == ElementKind::Q1 ? 4 : 9; }

/// Basis values and reference-coordinate derivatives at one point of [0,1]^2.
///
/// Q1 local nodes follow the counter-clockwise corner ordering
/// (0,0),(1,0),(1,1),(0,1) so they line up with element vertex ids.
/// Q2 local nodes are the 3x3 tensor grid in lexicographic order: node 3j+i
/// sits at (xi_i, eta_j) with 1D nodes {0, 1/2, 1}; corners are locals
/// 0,2,8,6 and the cell bubble is local 4.
struct ShapeValues {
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 9, 1> N;
  Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor, 9, 2> grad;
  // Reference second derivatives, columns: (xi.xi, xi.eta, eta.eta).
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor, 9, 3> hess;
};

/// Throws std::domain_error when `ref` lies outside the closed unit square.
ShapeValues shape_eval(ElementKind kind, const Eigen::Vector2d& ref);

Eigen::Vector2d local_node(ElementKind kind, int local);

}  // namespace lcamr
