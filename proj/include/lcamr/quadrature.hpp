#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lcamr {

/// Gauss-Legendre rule on [0,1]; `order` is the point count (1..6).
/// Exact for polynomials of degree 2*order-1. Weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// Tensor-product Gauss rule on the reference square [0,1]^2.
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;  // sum to 1 (reference area)
  int size() const { return static_cast<int>(points.size()); }
};

LineRule gauss1d(int order);
QuadratureRule quadrature(int order);

}  // namespace lcamr
