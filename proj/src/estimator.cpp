#include "lcamr/estimator.hpp"

#include <cmath>

#include "lcamr/quadrature.hpp"

namespace lcamr {

namespace {

constexpr int kVolumeOrder = 3;
constexpr int kEdgeOrder = 4;

struct PointData {
  Eigen::Vector3d n;
  Eigen::Matrix<double, 3, 2> grad;
  std::array<Eigen::Vector3d, 3> hess;  // per component (xx, xy, yy)
  double multiplier = 0.0;              // physical lambda
  double detJ = 1.0;
  Eigen::Vector2d xphys;
};

PointData eval_state(const DirectorState& state, const ProblemConfig& cfg,
                     int elem, const Eigen::Vector2d& ref, bool second) {
  const auto b = detail::basis_at(state.space->mesh(), elem, ref, second);
  const auto f = detail::field_at(state, elem, b, second);
  PointData p;
  p.n = f.n;
  p.grad = f.grad;
  p.hess = f.hess;
  p.detJ = b.detJ;
  p.xphys = b.xphys;
  if (cfg.formulation == Formulation::lagrangian)
    p.multiplier = state.multiplier_at(elem, ref);
  return p;
}

PointData eval_analytic(const AnalyticField& field,
                        const Eigen::Vector2d& xphys) {
  PointData p;
  p.n = field.value(xphys);
  p.grad = field.gradient(xphys);
  const auto h = field.hessian(xphys);
  for (int c = 0; c < 3; ++c)
    p.hess[c] = Eigen::Vector3d(h[c](0, 0), h[c](0, 1), h[c](1, 1));
  p.xphys = xphys;
  return p;
}

// Strong residual of the integrated-by-parts optimality system at one point.
Eigen::Vector3d strong_residual_point(const PointData& p,
                                      const ProblemConfig& cfg) {
  const double kap = cfg.kappa();
  const Eigen::Vector3d curl(p.grad(2, 1), -p.grad(2, 0),
                             p.grad(1, 0) - p.grad(0, 1));
  const double nc = p.n.dot(curl);

  // grad(div n) with hess[c] = (xx, xy, yy) of component c
  const Eigen::Vector3d grad_div(p.hess[0][0] + p.hess[1][1],
                                 p.hess[0][1] + p.hess[1][2], 0.0);

  // d_a curl, a = x then y
  const Eigen::Vector3d dx_curl(p.hess[2][1], -p.hess[2][0],
                                p.hess[1][0] - p.hess[0][1]);
  const Eigen::Vector3d dy_curl(p.hess[2][2], -p.hess[2][1],
                                p.hess[1][1] - p.hess[0][2]);

  // w = Z(n) curl n and its spatial derivatives
  const Eigen::Vector2d dn_c(p.grad.col(0).dot(curl), p.grad.col(1).dot(curl));
  const Eigen::Vector2d n_dc(p.n.dot(dx_curl), p.n.dot(dy_curl));
  const Eigen::Vector3d dx_w =
      dx_curl - (1.0 - kap) * ((dn_c.x() + n_dc.x()) * p.n + nc * p.grad.col(0));
  const Eigen::Vector3d dy_w =
      dy_curl - (1.0 - kap) * ((dn_c.y() + n_dc.y()) * p.n + nc * p.grad.col(1));
  const Eigen::Vector3d curl_w(dy_w[2], -dx_w[2], dx_w[1] - dy_w[0]);

  Eigen::Vector3d r = -cfg.K1 * grad_div + cfg.K3 * curl_w +
                      (cfg.K2 - cfg.K3) * nc * curl +
                      2.0 * cfg.K2 * cfg.t0 * curl;
  if (cfg.formulation == Formulation::penalty)
    r += 2.0 * cfg.zeta * (p.n.squaredNorm() - 1.0) * p.n;
  else
    r += p.multiplier * p.n;
  return r;
}

Eigen::Vector3d flux(const PointData& p, const ProblemConfig& cfg,
                     const Eigen::Vector2d& normal) {
  const Eigen::Vector3d eta(normal.x(), normal.y(), 0.0);
  const double div = p.grad(0, 0) + p.grad(1, 1);
  const Eigen::Vector3d curl(p.grad(2, 1), -p.grad(2, 0),
                             p.grad(1, 0) - p.grad(0, 1));
  const Eigen::Vector3d Zc = z_apply(p.n, cfg.kappa(), curl);
  return cfg.K1 * div * eta + cfg.K3 * Zc.cross(eta);
}

// Reference coordinates of side-parameter p on local side s (CCW).
Eigen::Vector2d side_point(int side, double p) {
  switch (side) {
    case 0:
      return {p, 0.0};
    case 1:
      return {1.0, p};
    case 2:
      return {1.0 - p, 1.0};
    default:
      return {0.0, 1.0 - p};
  }
}

// Side parameter of a facet endpoint within an adjacent element's side:
// 0 or 1 at the side corners, 1/2 at a hanging midpoint.
double endpoint_param(const Mesh& mesh, const Edge& ed, int k, int vertex) {
  const Element& el = mesh.elements[ed.elem[k]];
  const int su = el.v[ed.side[k]];
  const int sw = el.v[(ed.side[k] + 1) % 4];
  if (vertex == su) return 0.0;
  if (vertex == sw) return 1.0;
  return 0.5;
}

template <typename EvalSide>
std::vector<Eigen::Vector3d> jump_on_edge(const Mesh& mesh, int edge,
                                          const ProblemConfig& cfg,
                                          const Eigen::Vector2d& normal,
                                          EvalSide&& eval_side) {
  const Edge& ed = mesh.edges[edge];
  if (ed.boundary)
    throw std::invalid_argument("edge_jump: boundary edges carry no jump");
  static const LineRule rule = gauss1d(kEdgeOrder);

  std::vector<Eigen::Vector3d> out(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q];
    Eigen::Vector3d f[2];
    for (int k = 0; k < 2; ++k) {
      const double t0 = endpoint_param(mesh, ed, k, ed.v0);
      const double t1 = endpoint_param(mesh, ed, k, ed.v1);
      const Eigen::Vector2d ref =
          side_point(ed.side[k], t0 + (t1 - t0) * t);
      f[k] = flux(eval_side(ed.elem[k], ref), cfg, normal);
    }
    out[q] = f[0] - f[1];
  }
  return out;
}

template <typename EvalVolume, typename EvalSide>
ElementEstimates estimate_impl(const Mesh& mesh, const ProblemConfig& cfg,
                               bool with_constraint, EvalVolume&& eval_volume,
                               EvalSide&& eval_side) {
  const int ne = mesh.n_elements();
  ElementEstimates est;
  est.theta.assign(ne, 0.0);
  est.interior.assign(ne, 0.0);
  est.jump.assign(ne, 0.0);
  est.constraint.assign(ne, 0.0);

  const QuadratureRule vol = quadrature(kVolumeOrder);
  for (int e = 0; e < ne; ++e) {
    double r2 = 0.0, c2 = 0.0;
    for (int q = 0; q < vol.size(); ++q) {
      const PointData p = eval_volume(e, vol.points[q]);
      const double w = vol.weights[q] * p.detJ;
      r2 += w * strong_residual_point(p, cfg).squaredNorm();
      if (with_constraint) {
        const double nn1 = p.n.squaredNorm() - 1.0;
        c2 += w * nn1 * nn1;
      }
    }
    const double h = mesh.element_diameter(e);
    est.interior[e] = h * h * r2;
    est.constraint[e] = c2;
  }

  static const LineRule edge_rule = gauss1d(kEdgeOrder);
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& ed = mesh.edges[ei];
    if (ed.boundary) continue;
    const auto jumps = jump_on_edge(mesh, ei, cfg, ed.normal, eval_side);
    const double he = mesh.edge_length(ei);
    double j2 = 0.0;
    for (int q = 0; q < edge_rule.size(); ++q)
      j2 += edge_rule.weights[q] * he * jumps[q].squaredNorm();
    est.jump[ed.elem[0]] += he * j2;
    est.jump[ed.elem[1]] += he * j2;
  }

  double total = 0.0;
  for (int e = 0; e < ne; ++e) {
    const double t2 = est.interior[e] + est.jump[e] +
                      (with_constraint ? est.constraint[e] : 0.0);
    est.theta[e] = std::sqrt(t2);
    total += t2;
  }
  est.global_estimate = std::sqrt(total);
  return est;
}

}  // namespace

Eigen::Vector3d strong_residual(const DirectorState& state,
                                const ProblemConfig& cfg, int elem,
                                const Eigen::Vector2d& ref) {
  return strong_residual_point(eval_state(state, cfg, elem, ref, true), cfg);
}

std::vector<Eigen::Vector3d> edge_jump(const DirectorState& state,
                                       const ProblemConfig& cfg, int edge) {
  return edge_jump(state, cfg, edge, state.space->mesh().edges[edge].normal);
}

std::vector<Eigen::Vector3d> edge_jump(const DirectorState& state,
                                       const ProblemConfig& cfg, int edge,
                                       const Eigen::Vector2d& normal) {
  const Mesh& mesh = state.space->mesh();
  return jump_on_edge(mesh, edge, cfg, normal,
                      [&](int e, const Eigen::Vector2d& ref) {
                        return eval_state(state, cfg, e, ref, false);
                      });
}

ElementEstimates estimate(const DirectorState& state,
                          const ProblemConfig& cfg) {
  const Mesh& mesh = state.space->mesh();
  return estimate_impl(
      mesh, cfg, cfg.formulation == Formulation::lagrangian,
      [&](int e, const Eigen::Vector2d& ref) {
        return eval_state(state, cfg, e, ref, true);
      },
      [&](int e, const Eigen::Vector2d& ref) {
        return eval_state(state, cfg, e, ref, false);
      });
}

ElementEstimates estimate_analytic(const AnalyticField& field,
                                   const ProblemConfig& cfg, const Mesh& mesh) {
  auto eval = [&](int e, const Eigen::Vector2d& ref) {
    const auto b = detail::basis_at(mesh, e, ref, false);
    PointData p = eval_analytic(field, b.xphys);
    p.detJ = b.detJ;
    return p;
  };
  return estimate_impl(mesh, cfg,
                       cfg.formulation == Formulation::lagrangian, eval, eval);
}

Eigen::Vector3d strong_residual_analytic(const AnalyticField& field,
                                         const ProblemConfig& cfg,
                                         const Eigen::Vector2d& xphys) {
  return strong_residual_point(eval_analytic(field, xphys), cfg);
}

}  // namespace lcamr
