#include "lcamr/shapes.hpp"

#include <stdexcept>

namespace lcamr {

namespace {

constexpr double kDomainTol = 1e-12;

// 1D quadratic Lagrange basis on nodes {0, 1/2, 1}.
inline void lag2(double x, double v[3], double d[3], double dd[3]) {
  v[0] = 2.0 * x * x - 3.0 * x + 1.0;
  v[1] = 4.0 * x * (1.0 - x);
  v[2] = 2.0 * x * x - x;
  d[0] = 4.0 * x - 3.0;
  d[1] = 4.0 - 8.0 * x;
  d[2] = 4.0 * x - 1.0;
  dd[0] = 4.0;
  dd[1] = -8.0;
  dd[2] = 4.0;
}

}  // namespace

ShapeValues shape_eval(ElementKind kind, const Eigen::Vector2d& ref) {
  const double xi = ref.x(), eta = ref.y();
  if (xi < -kDomainTol || xi > 1.0 + kDomainTol || eta < -kDomainTol ||
      eta > 1.0 + kDomainTol) {
    throw std::domain_error("shape_eval: point outside reference square");
  }

  ShapeValues s;
  if (kind == ElementKind::Q1) {
    s.N.resize(4);
    s.grad.resize(4, 2);
    s.hess.resize(4, 3);
    s.N << (1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta;
    s.grad << -(1 - eta), -(1 - xi),  //
        (1 - eta), -xi,               //
        eta, xi,                      //
        -eta, (1 - xi);
    // Bilinear: only the mixed second derivative survives.
    s.hess.setZero();
    s.hess(0, 1) = 1.0;
    s.hess(1, 1) = -1.0;
    s.hess(2, 1) = 1.0;
    s.hess(3, 1) = -1.0;
    return s;
  }

  double lx[3], dx[3], ddx[3], ly[3], dy[3], ddy[3];
  lag2(xi, lx, dx, ddx);
  lag2(eta, ly, dy, ddy);
  s.N.resize(9);
  s.grad.resize(9, 2);
  s.hess.resize(9, 3);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const int l = 3 * j + i;
      s.N(l) = lx[i] * ly[j];
      s.grad(l, 0) = dx[i] * ly[j];
      s.grad(l, 1) = lx[i] * dy[j];
      s.hess(l, 0) = ddx[i] * ly[j];
      s.hess(l, 1) = dx[i] * dy[j];
      s.hess(l, 2) = lx[i] * ddy[j];
    }
  }
  return s;
}

Eigen::Vector2d local_node(ElementKind kind, int local) {
  if (kind == ElementKind::Q1) {
    static const double q1[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return {q1[local][0], q1[local][1]};
  }
  static const double n1d[3] = {0.0, 0.5, 1.0};
  return {n1d[local % 3], n1d[local / 3]};
}

}  // namespace lcamr
