#include "lcamr/physics.hpp"

#include <cmath>
#include <limits>

#include "lcamr/quadrature.hpp"

namespace lcamr {

namespace {

constexpr int kVolumeOrder = 3;  // 9-point Gauss for all volume terms

const QuadratureRule& volume_rule() {
  static const QuadratureRule rule = quadrature(kVolumeOrder);
  return rule;
}

// Q2 shape tables at the volume rule points, evaluated once.
const std::vector<ShapeValues>& q2_tables() {
  static const std::vector<ShapeValues> tables = [] {
    std::vector<ShapeValues> t;
    for (const auto& p : volume_rule().points)
      t.push_back(shape_eval(ElementKind::Q2, p));
    return t;
  }();
  return tables;
}

const std::vector<ShapeValues>& q1_tables() {
  static const std::vector<ShapeValues> tables = [] {
    std::vector<ShapeValues> t;
    for (const auto& p : volume_rule().points)
      t.push_back(shape_eval(ElementKind::Q1, p));
    return t;
  }();
  return tables;
}

// curl of e_i * N for a scalar basis with physical gradient g, in the
// z-independent 3-component convention.
inline Eigen::Vector3d basis_curl(int comp, const Eigen::Vector2d& g) {
  switch (comp) {
    case 0:
      return {0.0, 0.0, -g.y()};
    case 1:
      return {0.0, 0.0, g.x()};
    default:
      return {g.y(), -g.x(), 0.0};
  }
}

inline double basis_div(int comp, const Eigen::Vector2d& g) {
  return comp == 0 ? g.x() : (comp == 1 ? g.y() : 0.0);
}

detail::BasisAtPoint basis_from_tables(const Mesh& mesh, int elem,
                                       const ShapeValues& q2,
                                       const ShapeValues& q1, bool second) {
  detail::BasisAtPoint b;
  const auto C = mesh.corners(elem);
  const Eigen::Matrix2d J = C * q1.grad;
  b.detJ = J.determinant();
  const Eigen::Matrix2d K = J.inverse();  // K(alpha, a) = d xi_alpha / d x_a
  b.xphys = C * q1.N;

  for (int l = 0; l < 4; ++l) {
    b.N1[l] = q1.N(l);
    b.dN1[l] = K.transpose() * q1.grad.row(l).transpose();
  }
  for (int l = 0; l < 9; ++l) {
    b.N[l] = q2.N(l);
    b.dN[l] = K.transpose() * q2.grad.row(l).transpose();
  }

  if (second) {
    // Bilinear map: only the mixed reference second derivative of x(xi) is
    // nonzero, d2x/dxi deta = D.
    const Eigen::Vector2d D =
        C.col(0) - C.col(1) + C.col(2) - C.col(3);
    const Eigen::Vector2d KD = K * D;
    // S_ab = K(0,a)K(1,b) + K(1,a)K(0,b) multiplies the mixed reference term.
    auto S = [&](int a, int bb) {
      return K(0, a) * K(1, bb) + K(1, a) * K(0, bb);
    };
    const double Sxx = S(0, 0), Sxy = S(0, 1), Syy = S(1, 1);
    for (int l = 0; l < 9; ++l) {
      const double h0 = q2.hess(l, 0), h1 = q2.hess(l, 1), h2 = q2.hess(l, 2);
      const double corr = KD.x() * q2.grad(l, 0) + KD.y() * q2.grad(l, 1);
      auto hab = [&](int a, int bb, double Sab) {
        return K(0, a) * K(0, bb) * h0 + Sab * h1 + K(1, a) * K(1, bb) * h2 -
               corr * Sab;
      };
      b.d2N[l] = {hab(0, 0, Sxx), hab(0, 1, Sxy), hab(1, 1, Syy)};
    }
  }
  return b;
}

}  // namespace

namespace detail {

BasisAtPoint basis_at(const Mesh& mesh, int elem, const Eigen::Vector2d& ref,
                      bool second_derivatives) {
  return basis_from_tables(mesh, elem, shape_eval(ElementKind::Q2, ref),
                           shape_eval(ElementKind::Q1, ref),
                           second_derivatives);
}

FieldAtPoint field_at(const DirectorState& state, int elem,
                      const BasisAtPoint& b, bool second) {
  FieldAtPoint f;
  f.n.setZero();
  f.grad.setZero();
  for (auto& h : f.hess) h.setZero();
  const FeSpace& sp = *state.space;
  const int N = sp.n_q2_scalar();
  for (int l = 0; l < 9; ++l) {
    const int dof = sp.q2_dof(elem, l);
    for (int c = 0; c < 3; ++c) {
      const double u = state.coeffs[c * N + dof];
      f.n[c] += u * b.N[l];
      f.grad(c, 0) += u * b.dN[l].x();
      f.grad(c, 1) += u * b.dN[l].y();
      if (second) f.hess[c] += u * b.d2N[l];
    }
  }
  return f;
}

}  // namespace detail

std::string to_string(Formulation f) {
  return f == Formulation::penalty ? "penalty" : "lagrangian";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "penalty") return Formulation::penalty;
  if (s == "lagrangian") return Formulation::lagrangian;
  throw std::invalid_argument("unknown formulation: " + s);
}

void ProblemConfig::validate() const {
  if (!(K1 > 0 && K2 > 0 && K3 > 0))
    throw std::invalid_argument("ProblemConfig: Frank constants must be > 0");
  if (formulation == Formulation::penalty && !(zeta > 0))
    throw std::invalid_argument("ProblemConfig: zeta must be > 0");
  if (!(damping.alpha0 > 0 && damping.alpha0 <= damping.alpha_max &&
        damping.alpha_max <= 1.0))
    throw std::invalid_argument("ProblemConfig: need 0 < alpha0 <= alpha_max <= 1");
}

Eigen::Vector3d z_apply(const Eigen::Vector3d& n, double kappa,
                        const Eigen::Vector3d& w) {
  return w - (1.0 - kappa) * n.dot(w) * n;
}

EnergyRecord energy(const DirectorState& state, const ProblemConfig& cfg) {
  const Mesh& mesh = state.space->mesh();
  const QuadratureRule& rule = volume_rule();
  const double kap = cfg.kappa();
  double G = 0.0, area = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const auto b =
          basis_from_tables(mesh, e, q2_tables()[q], q1_tables()[q], false);
      const auto f = detail::field_at(state, e, b, false);
      const double div = f.grad(0, 0) + f.grad(1, 1);
      const Eigen::Vector3d curl(f.grad(2, 1), -f.grad(2, 0),
                                 f.grad(1, 0) - f.grad(0, 1));
      const double nc = f.n.dot(curl);
      const double w = rule.weights[q] * b.detJ;
      G += w * (cfg.K1 * div * div +
                cfg.K3 * (curl.squaredNorm() - (1.0 - kap) * nc * nc) +
                2.0 * cfg.K2 * cfg.t0 * nc);
      area += w;
    }
  }
  EnergyRecord rec;
  rec.G = G;
  rec.G_half = 0.5 * G;
  rec.constant_term = 0.5 * cfg.K2 * cfg.t0 * cfg.t0 * area;
  return rec;
}

std::vector<double> energy_density_field(const DirectorState& state,
                                         const ProblemConfig& cfg) {
  const Mesh& mesh = state.space->mesh();
  const QuadratureRule& rule = volume_rule();
  const double kap = cfg.kappa();
  std::vector<double> mean(mesh.n_elements(), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double num = 0.0, area = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto b =
          basis_from_tables(mesh, e, q2_tables()[q], q1_tables()[q], false);
      const auto f = detail::field_at(state, e, b, false);
      const double div = f.grad(0, 0) + f.grad(1, 1);
      const Eigen::Vector3d curl(f.grad(2, 1), -f.grad(2, 0),
                                 f.grad(1, 0) - f.grad(0, 1));
      const double nc = f.n.dot(curl);
      const double wf =
          0.5 * cfg.K1 * div * div +
          0.5 * cfg.K3 * (curl.squaredNorm() - (1.0 - kap) * nc * nc) +
          cfg.K2 * cfg.t0 * nc + 0.5 * cfg.K2 * cfg.t0 * cfg.t0;
      const double w = rule.weights[q] * b.detJ;
      num += w * wf;
      area += w;
    }
    mean[e] = num / area;
  }
  return mean;
}

namespace {

// Shared residual/Jacobian assembly. Builds the element-local contributions
// of the first-order optimality system and scatters them under constraints.
void assemble(const DirectorState& state, const ProblemConfig& cfg,
              const ConstraintSet& cs, Eigen::VectorXd* res_out,
              std::vector<Eigen::Triplet<double>>* jac_out) {
  cfg.validate();
  const FeSpace& sp = *state.space;
  const Mesh& mesh = sp.mesh();
  const bool lag = cfg.formulation == Formulation::lagrangian;
  if (lag && !sp.has_multiplier())
    throw std::invalid_argument("lagrangian assembly needs a multiplier space");
  const QuadratureRule& rule = volume_rule();
  const double kap = cfg.kappa();
  const int nloc = lag ? 31 : 27;  // 3x9 director locals (+4 multiplier)

  std::vector<int> dofs(nloc);
  Eigen::VectorXd local_r(nloc);
  Eigen::MatrixXd local_j(nloc, nloc);

  std::array<double, 27> divv{};
  std::array<Eigen::Vector3d, 27> curlv{};

  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int c = 0; c < 3; ++c)
      for (int l = 0; l < 9; ++l)
        dofs[c * 9 + l] = sp.director_dof(c, sp.q2_dof(e, l));
    if (lag)
      for (int l = 0; l < 4; ++l)
        dofs[27 + l] = sp.multiplier_dof(sp.q1_dof(e, l));

    local_r.setZero();
    if (jac_out) local_j.setZero();

    for (int q = 0; q < rule.size(); ++q) {
      const auto b =
          basis_from_tables(mesh, e, q2_tables()[q], q1_tables()[q], false);
      const auto f = detail::field_at(state, e, b, false);
      const double w = rule.weights[q] * b.detJ;

      const double div = f.grad(0, 0) + f.grad(1, 1);
      const Eigen::Vector3d curl(f.grad(2, 1), -f.grad(2, 0),
                                 f.grad(1, 0) - f.grad(0, 1));
      const double nc = f.n.dot(curl);
      const Eigen::Vector3d Zc = z_apply(f.n, kap, curl);
      const double nn1 = f.n.squaredNorm() - 1.0;

      double lam = 0.0;  // stored multiplier coefficient field (lambda/2)
      if (lag)
        for (int l = 0; l < 4; ++l)
          lam += state.coeffs[dofs[27 + l]] * b.N1[l];

      for (int c = 0; c < 3; ++c) {
        for (int l = 0; l < 9; ++l) {
          divv[c * 9 + l] = basis_div(c, b.dN[l]);
          curlv[c * 9 + l] = basis_curl(c, b.dN[l]);
        }
      }

      for (int i = 0; i < 27; ++i) {
        const int ci = i / 9, li = i % 9;
        const double Ni = b.N[li];
        const double vc = Ni * curl[ci];  // (e_ci N_li) . curl n
        double r = cfg.K1 * div * divv[i] + cfg.K3 * Zc.dot(curlv[i]) +
                   (cfg.K2 - cfg.K3) * nc * vc +
                   cfg.K2 * cfg.t0 * (vc + f.n.dot(curlv[i]));
        if (lag)
          r += 2.0 * lam * Ni * f.n[ci];
        else
          r += 2.0 * cfg.zeta * Ni * f.n[ci] * nn1;
        local_r[i] += w * r;
      }
      if (lag) {
        for (int m = 0; m < 4; ++m) local_r[27 + m] += w * b.N1[m] * nn1;
      }

      if (jac_out) {
        for (int i = 0; i < 27; ++i) {
          const int ci = i / 9, li = i % 9;
          const double Ni = b.N[li];
          const Eigen::Vector3d& yi = curlv[i];
          const double n_yi = f.n.dot(yi);
          const double vc_i = Ni * curl[ci];
          for (int j = 0; j <= i; ++j) {
            const int cj = j / 9, lj = j % 9;
            const double Nj = b.N[lj];
            const Eigen::Vector3d& dj = curlv[j];
            double a = cfg.K1 * divv[i] * divv[j];
            // Z(n) curl(d) . curl(v) plus the derivative of Z through n
            a += cfg.K3 * (dj.dot(yi) - (1.0 - kap) * f.n.dot(dj) * n_yi);
            a += (cfg.K2 - cfg.K3) *
                 (nc * Nj * yi[cj] + Nj * curl[cj] * n_yi);
            // product rule of the (K2-K3)(n.curl n)(v.curl n) term
            a += (cfg.K2 - cfg.K3) *
                 ((Nj * curl[cj] + f.n.dot(dj)) * vc_i + nc * Ni * dj[ci]);
            a += cfg.K2 * cfg.t0 * (Ni * dj[ci] + Nj * yi[cj]);
            if (lag) {
              if (ci == cj) a += 2.0 * lam * Ni * Nj;
            } else {
              a += 2.0 * cfg.zeta *
                   ((ci == cj ? Ni * Nj * nn1 : 0.0) +
                    2.0 * Ni * f.n[ci] * Nj * f.n[cj]);
            }
            local_j(i, j) += w * a;
            if (j != i) local_j(j, i) += w * a;
          }
        }
        if (lag) {
          for (int i = 0; i < 27; ++i) {
            const int ci = i / 9, li = i % 9;
            const double coup = 2.0 * b.N[li] * f.n[ci];
            for (int m = 0; m < 4; ++m) {
              const double v = w * coup * b.N1[m];
              local_j(i, 27 + m) += v;
              local_j(27 + m, i) += v;
            }
          }
          // multiplier-multiplier block is identically zero
        }
      }
    }

    if (res_out) cs.add_local_vector(dofs, local_r, *res_out);
    if (jac_out) cs.add_local_matrix(dofs, local_j, *jac_out);
  }
}

}  // namespace

Eigen::VectorXd residual(const DirectorState& state, const ProblemConfig& cfg,
                         const ConstraintSet& cs) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(state.space->n_total_dofs());
  assemble(state, cfg, cs, &r, nullptr);
  return r;
}

Eigen::SparseMatrix<double> jacobian(const DirectorState& state,
                                     const ProblemConfig& cfg,
                                     const ConstraintSet& cs) {
  std::vector<Eigen::Triplet<double>> trips;
  const bool lag = cfg.formulation == Formulation::lagrangian;
  trips.reserve(state.space->mesh().n_elements() * (lag ? 961 : 729));
  assemble(state, cfg, cs, nullptr, &trips);
  cs.append_identity_tail(trips);
  const int n = state.space->n_total_dofs();
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trips.begin(), trips.end());
  J.makeCompressed();
  return J;
}

namespace {

void require_formulation(const ProblemConfig& cfg, Formulation f,
                         const char* op) {
  if (cfg.formulation != f)
    throw std::invalid_argument(std::string(op) +
                                ": config uses the other formulation");
}

}  // namespace

Eigen::VectorXd residual_penalty(const DirectorState& s, const ProblemConfig& c,
                                 const ConstraintSet& cs) {
  require_formulation(c, Formulation::penalty, "residual_penalty");
  return residual(s, c, cs);
}

Eigen::SparseMatrix<double> jacobian_penalty(const DirectorState& s,
                                             const ProblemConfig& c,
                                             const ConstraintSet& cs) {
  require_formulation(c, Formulation::penalty, "jacobian_penalty");
  return jacobian(s, c, cs);
}

Eigen::VectorXd residual_lagrangian(const DirectorState& s,
                                    const ProblemConfig& c,
                                    const ConstraintSet& cs) {
  require_formulation(c, Formulation::lagrangian, "residual_lagrangian");
  return residual(s, c, cs);
}

Eigen::SparseMatrix<double> jacobian_lagrangian(const DirectorState& s,
                                                const ProblemConfig& c,
                                                const ConstraintSet& cs) {
  require_formulation(c, Formulation::lagrangian, "jacobian_lagrangian");
  return jacobian(s, c, cs);
}

DeviationReport deviation_report(const DirectorState& state) {
  const Mesh& mesh = state.space->mesh();
  const QuadratureRule& rule = volume_rule();
  DeviationReport rep;
  rep.max_dev = -std::numeric_limits<double>::max();
  rep.min_dev = std::numeric_limits<double>::max();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const auto b =
          basis_from_tables(mesh, e, q2_tables()[q], q1_tables()[q], false);
      const auto f = detail::field_at(state, e, b, false);
      const double dev = f.n.norm() - 1.0;
      rep.max_dev = std::max(rep.max_dev, dev);
      rep.min_dev = std::min(rep.min_dev, dev);
    }
  }
  return rep;
}

namespace {

double error_norm(const DirectorState& state, const AnalyticField& exact,
                  int quad_order, bool with_gradient) {
  const Mesh& mesh = state.space->mesh();
  const QuadratureRule rule = quadrature(quad_order);
  std::vector<ShapeValues> q2t, q1t;
  for (const auto& p : rule.points) {
    q2t.push_back(shape_eval(ElementKind::Q2, p));
    q1t.push_back(shape_eval(ElementKind::Q1, p));
  }
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const auto b = basis_from_tables(mesh, e, q2t[q], q1t[q], false);
      const auto f = detail::field_at(state, e, b, false);
      const double w = rule.weights[q] * b.detJ;
      acc += w * (f.n - exact.value(b.xphys)).squaredNorm();
      if (with_gradient)
        acc += w * (f.grad - exact.gradient(b.xphys)).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

}  // namespace

double l2_error(const DirectorState& state, const AnalyticField& exact,
                int quad_order) {
  return error_norm(state, exact, quad_order, false);
}

double h1_error(const DirectorState& state, const AnalyticField& exact,
                int quad_order) {
  return error_norm(state, exact, quad_order, true);
}

}  // namespace lcamr
