#include "lcamr/solver.hpp"

#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>

#include "lcamr/amr.hpp"

namespace lcamr {

double work_units(const SolveStats& stats,
                  std::optional<std::int64_t> divisor_nnz) {
  if (stats.levels.empty())
    throw std::invalid_argument("work_units: empty statistics");
  const std::int64_t divisor =
      divisor_nnz.has_value() ? *divisor_nnz : stats.finest_nnz();
  if (divisor <= 0)
    throw std::invalid_argument("work_units: missing finest-grid nonzero count");
  double wu = 0.0;
  for (const LevelRecord& rec : stats.levels)
    wu += static_cast<double>(rec.newton_iterations) * rec.hessian_nnz /
          static_cast<double>(divisor);
  return wu;
}

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& J,
                             const Eigen::VectorXd& rhs) {
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return Eigen::VectorXd::Zero(rhs.size());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(J);
  lu.factorize(J);
  if (lu.info() != Eigen::Success)
    throw LinearSolverError("linear_solve: factorization failed: " +
                            lu.lastErrorMessage());
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw LinearSolverError("linear_solve: back substitution failed");

  const double res = (J * x - rhs).norm();
  if (res > 1e-10 * rhs_norm && rhs_norm > 1e-12)
    throw LinearSolverError("linear_solve: residual " + std::to_string(res) +
                            " exceeds 1e-10 * ||rhs||; matrix nearly singular");
  return x;
}

NewtonResult newton_solve(DirectorState state, const ProblemConfig& cfg,
                          const ConstraintSet& cs, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("newton_solve: alpha must be in (0, 1]");
  NewtonResult out;
  out.hessian_nnz = -1;
  double prev = std::numeric_limits<double>::max();
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd r = residual(state, cfg, cs);
    const double rn = r.norm();
    out.residual_history.push_back(rn);
    if (rn > prev && alpha >= 1.0) ++out.residual_increases;
    prev = rn;
    if (rn <= cfg.newton_tol) {
      if (out.hessian_nnz < 0)
        out.hessian_nnz = jacobian(state, cfg, cs).nonZeros();
      out.state = std::move(state);
      out.iterations = iter;
      out.final_residual = rn;
      return out;
    }
    if (iter >= cfg.max_newton_iters)
      throw NonConvergenceError(
          "newton_solve: residual " + std::to_string(rn) + " > tol " +
              std::to_string(cfg.newton_tol) + " after " +
              std::to_string(iter) + " iterations",
          rn, iter);
    const Eigen::SparseMatrix<double> J = jacobian(state, cfg, cs);
    out.hessian_nnz = J.nonZeros();
    Eigen::VectorXd delta = linear_solve(J, (-r).eval());
    cs.distribute_homogeneous(delta);
    state.coeffs += alpha * delta;
  }
}

DirectorState initial_state(
    std::shared_ptr<const FeSpace> space,
    const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& g,
    const ConstraintSet& cs) {
  const Mesh& mesh = space->mesh();
  std::function<Eigen::Vector3d(const Eigen::Vector2d&)> blend;

  if (mesh.boundary.kind == BoundaryDescriptor::Kind::ellipse) {
    const double a = mesh.boundary.a, b = mesh.boundary.b;
    blend = [&mesh, g, a, b](const Eigen::Vector2d& x) -> Eigen::Vector3d {
      if (std::hypot(x.x() / a, x.y() / b) < 1e-8) return {0.0, 0.0, 1.0};
      return g(mesh.boundary.project(x));
    };
  } else {
    Eigen::Vector2d lo = mesh.vertices.front(), hi = lo;
    for (const auto& v : mesh.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    blend = [g, lo, hi](const Eigen::Vector2d& p) -> Eigen::Vector3d {
      const double sx = (p.x() - lo.x()) / (hi.x() - lo.x());
      const double sy = (p.y() - lo.y()) / (hi.y() - lo.y());
      return (1 - sy) * g({p.x(), lo.y()}) + sy * g({p.x(), hi.y()}) +
             (1 - sx) * g({lo.x(), p.y()}) + sx * g({hi.x(), p.y()}) -
             ((1 - sx) * (1 - sy) * g(lo) + sx * (1 - sy) * g({hi.x(), lo.y()}) +
              sx * sy * g(hi) + (1 - sx) * sy * g({lo.x(), hi.y()}));
    };
  }

  DirectorState st = interpolate(space, [&](const Eigen::Vector2d& x) {
    Eigen::Vector3d v = blend(x);
    const double len = v.norm();
    return len < 1e-8 ? Eigen::Vector3d(0.0, 0.0, 1.0)
                      : Eigen::Vector3d(v / len);
  });
  cs.distribute(st.coeffs);
  return st;
}

NestedIterationResult nested_iteration(
    const ProblemConfig& cfg, std::shared_ptr<const Mesh> mesh,
    const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& g,
    int levels, RefinementMode mode, const LevelCallback& callback) {
  if (levels < 1)
    throw std::invalid_argument("nested_iteration: levels must be >= 1");
  cfg.validate();

  const bool mult = cfg.formulation == Formulation::lagrangian;
  auto space = std::make_shared<FeSpace>(mesh, mult);
  ConstraintSet cs = build_constraints(*space, g);
  DirectorState state = initial_state(space, g, cs);

  SolveStats stats;
  double alpha = cfg.damping.alpha0;
  const auto t_start = std::chrono::steady_clock::now();

  for (int level = 0; level < levels; ++level) {
    const auto t0 = std::chrono::steady_clock::now();
    NewtonResult nr;
    try {
      nr = newton_solve(std::move(state), cfg, cs, alpha);
    } catch (const NonConvergenceError& err) {
      throw NestedIterationError(
          "level " + std::to_string(level + 1) + ": " + err.what(), level,
          std::move(stats));
    } catch (const LinearSolverError& err) {
      throw NestedIterationError(
          "level " + std::to_string(level + 1) + ": " + err.what(), level,
          std::move(stats));
    }
    state = std::move(nr.state);

    const ElementEstimates est = estimate(state, cfg);

    LevelRecord rec;
    rec.level = level;
    rec.n_elements = mesh->n_elements();
    rec.dofs = space->n_total_dofs();
    rec.newton_iterations = nr.iterations;
    rec.final_residual = nr.final_residual;
    rec.alpha = alpha;
    rec.hessian_nnz = nr.hessian_nnz;
    rec.residual_increases = nr.residual_increases;
    rec.energy = energy(state, cfg);
    rec.deviation = deviation_report(state);
    rec.global_estimate = est.global_estimate;
    rec.theta_max =
        est.theta.empty() ? 0.0
                          : *std::max_element(est.theta.begin(), est.theta.end());
    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    stats.levels.push_back(rec);

    std::vector<bool> flags;
    if (level + 1 < levels) {
      flags = mode == RefinementMode::uniform
                  ? std::vector<bool>(mesh->n_elements(), true)
                  : flag_top_fraction(est, cfg.flag_fraction).flags;
    }
    if (callback) callback(level, state, est, flags);
    if (level + 1 == levels) break;

    auto fine_mesh =
        std::make_shared<Mesh>(refine(*mesh, flags, mesh->boundary));
    auto fine_space = std::make_shared<FeSpace>(fine_mesh, mult);
    ConstraintSet fine_cs = build_constraints(*fine_space, g);
    state = transfer(state, fine_space);
    fine_cs.distribute(state.coeffs);

    mesh = std::move(fine_mesh);
    space = std::move(fine_space);
    cs = std::move(fine_cs);
    alpha = std::min(alpha + cfg.damping.delta, cfg.damping.alpha_max);
  }

  stats.total_wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return {std::move(state), std::move(stats)};
}

}  // namespace lcamr
