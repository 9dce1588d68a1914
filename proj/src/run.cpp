#include "lcamr/run.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lcamr/io.hpp"

namespace lcamr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(RunConfig::Mode m) {
  switch (m) {
    case RunConfig::Mode::adaptive:
      return "adaptive";
    case RunConfig::Mode::uniform:
      return "uniform";
    default:
      return "paired-both";
  }
}

RunConfig::Mode mode_from_string(const std::string& s) {
  if (s == "adaptive") return RunConfig::Mode::adaptive;
  if (s == "uniform") return RunConfig::Mode::uniform;
  if (s == "paired-both") return RunConfig::Mode::paired_both;
  throw std::invalid_argument("unknown refinement mode: " + s);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "preset")
      c.preset_name = value.get<std::string>();
    else if (key == "formulation")
      c.formulation = formulation_from_string(value.get<std::string>());
    else if (key == "levels")
      c.levels = value.get<int>();
    else if (key == "refine")
      c.mode = mode_from_string(value.get<std::string>());
    else if (key == "flag_fraction")
      c.flag_fraction = value.get<double>();
    else if (key == "out")
      c.out_dir = value.get<std::string>();
    else if (key == "seed")
      c.seed = value.get<unsigned>();
    else if (key == "t0")
      c.t0 = value.get<double>();
    else if (key == "zeta")
      c.zeta = value.get<double>();
    else if (key == "alpha0")
      c.alpha0 = value.get<double>();
    else if (key == "alpha_delta")
      c.alpha_delta = value.get<double>();
    else if (key == "newton_tol")
      c.newton_tol = value.get<double>();
    else if (key == "max_newton_iters")
      c.max_newton_iters = value.get<int>();
    else if (key == "nx")
      c.nx = value.get<int>();
    else if (key == "ny")
      c.ny = value.get<int>();
    else if (key == "ellipse_target")
      c.ellipse_target = value.get<int>();
    else if (key == "boundary_file")
      c.boundary_file = value.get<std::string>();
    else
      throw std::runtime_error("unknown config key: " + key);
  }
  return c;
}

namespace {

json level_json(const LevelRecord& r) {
  return json{{"level", r.level + 1},
              {"elements", r.n_elements},
              {"dofs", r.dofs},
              {"newton_iterations", r.newton_iterations},
              {"final_residual", r.final_residual},
              {"alpha", r.alpha},
              {"hessian_nnz", r.hessian_nnz},
              {"residual_increases", r.residual_increases},
              {"energy_G", r.energy.G},
              {"energy_wF", r.energy.wF()},
              {"energy_constant_term", r.energy.constant_term},
              {"max_dev", r.deviation.max_dev},
              {"min_dev", r.deviation.min_dev},
              {"global_estimate", r.global_estimate},
              {"theta_max", r.theta_max},
              {"wall_time_seconds", r.wall_time_seconds}};
}

json stats_json(const SolveStats& stats, double wu) {
  json levels = json::array();
  for (const auto& r : stats.levels) levels.push_back(level_json(r));
  return json{{"levels", levels},
              {"fine_dof", stats.finest_dofs()},
              {"fine_nnz", stats.finest_nnz()},
              {"wu", wu},
              {"wall_time_seconds", stats.total_wall_time}};
}

struct HierarchyOutput {
  SolveStats stats;
  bool failed = false;
  std::string error;
};

HierarchyOutput run_hierarchy(const ProblemConfig& cfg,
                              std::shared_ptr<const Mesh> coarse,
                              const BoundaryCondition& bc, int levels,
                              RefinementMode mode, const fs::path& out_dir,
                              const std::string& tag) {
  HierarchyOutput out;
  LevelCallback cb = [&](int level, const DirectorState& state,
                         const ElementEstimates& est,
                         const std::vector<bool>& flags) {
    const std::string name = tag + "_level_" + std::to_string(level + 1) + ".vtk";
    write_fields_vtk((out_dir / name).string(), state,
                     energy_density_field(state, cfg), est.theta, flags);
  };
  try {
    out.stats = nested_iteration(cfg, std::move(coarse), bc.g, levels, mode, cb)
                    .stats;
  } catch (const NestedIterationError& err) {
    out.failed = true;
    out.error = err.what();
    out.stats = err.partial;
  }
  return out;
}

}  // namespace

int run(const RunConfig& rc) {
  const fs::path out_dir(rc.out_dir);
  fs::create_directories(out_dir);

  PresetOverrides ov;
  ov.t0 = rc.t0;
  ov.nx = rc.nx;
  ov.ny = rc.ny;
  ov.ellipse_target = rc.ellipse_target;
  Preset p = preset(rc.preset_name, rc.formulation, ov);

  ProblemConfig cfg = p.config;
  if (!std::isnan(rc.zeta)) cfg.zeta = rc.zeta;
  if (!std::isnan(rc.alpha0)) cfg.damping.alpha0 = rc.alpha0;
  if (!std::isnan(rc.alpha_delta)) cfg.damping.delta = rc.alpha_delta;
  if (!std::isnan(rc.newton_tol)) cfg.newton_tol = rc.newton_tol;
  if (!std::isnan(rc.flag_fraction)) cfg.flag_fraction = rc.flag_fraction;
  if (rc.max_newton_iters > 0) cfg.max_newton_iters = rc.max_newton_iters;

  BoundaryCondition bc = p.bc;
  if (!rc.boundary_file.empty()) {
    Eigen::Vector2d lo = p.coarse_mesh->vertices.front(), hi = lo;
    for (const auto& v : p.coarse_mesh->vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    bc = load_boundary_table(rc.boundary_file, p.coarse_mesh->boundary, lo, hi);
  }

  json manifest;
  manifest["preset"] = rc.preset_name;
  manifest["formulation"] = to_string(cfg.formulation);
  manifest["levels"] = rc.levels;
  manifest["refine"] = to_string(rc.mode);
  manifest["out"] = rc.out_dir;
  manifest["seed"] = rc.seed;
  manifest["boundary_id"] = bc.id;
  manifest["boundary_description"] = bc.description;
  if (!p.note.empty()) manifest["preset_note"] = p.note;
  if (!rc.boundary_file.empty()) manifest["boundary_file"] = rc.boundary_file;
  manifest["coarse_elements"] = p.coarse_mesh->n_elements();
  manifest["config"] = {{"K1", cfg.K1},
                        {"K2", cfg.K2},
                        {"K3", cfg.K3},
                        {"t0", cfg.t0},
                        {"zeta", cfg.zeta},
                        {"mu", cfg.mu},
                        {"K_char", cfg.K_char},
                        {"alpha0", cfg.damping.alpha0},
                        {"alpha_delta", cfg.damping.delta},
                        {"alpha_max", cfg.damping.alpha_max},
                        {"newton_tol", cfg.newton_tol},
                        {"max_newton_iters", cfg.max_newton_iters},
                        {"flag_fraction", cfg.flag_fraction}};

  bool failed = false;
  if (rc.mode == RunConfig::Mode::paired_both) {
    const HierarchyOutput adaptive =
        run_hierarchy(cfg, p.coarse_mesh, bc, rc.levels,
                      RefinementMode::adaptive, out_dir, "adaptive");
    double wu_adaptive = 0.0;
    if (!adaptive.failed) wu_adaptive = work_units(adaptive.stats);
    write_stats_csv((out_dir / "stats_adaptive.csv").string(), adaptive.stats,
                    wu_adaptive);
    manifest["adaptive"] = stats_json(adaptive.stats, wu_adaptive);

    HierarchyOutput uniform;
    double wu_uniform = 0.0;
    if (!adaptive.failed) {
      uniform = run_hierarchy(cfg, p.coarse_mesh, bc, rc.levels,
                              RefinementMode::uniform, out_dir, "uniform");
      if (!uniform.failed) {
        // Paired-run rule: uniform WUs are measured against the finest
        // adaptively refined grid's Hessian nonzeros.
        wu_uniform = work_units(uniform.stats, adaptive.stats.finest_nnz());
      }
      write_stats_csv((out_dir / "stats_uniform.csv").string(), uniform.stats,
                      wu_uniform);
      manifest["uniform"] = stats_json(uniform.stats, wu_uniform);
      manifest["uniform_wu_divisor_nnz"] = adaptive.stats.finest_nnz();
    }
    failed = adaptive.failed || uniform.failed;
    if (adaptive.failed) manifest["error"] = adaptive.error;
    if (uniform.failed) manifest["error"] = uniform.error;
  } else {
    const RefinementMode mode = rc.mode == RunConfig::Mode::uniform
                                    ? RefinementMode::uniform
                                    : RefinementMode::adaptive;
    const HierarchyOutput h = run_hierarchy(cfg, p.coarse_mesh, bc, rc.levels,
                                            mode, out_dir, to_string(rc.mode));
    double wu = 0.0;
    if (!h.failed && !h.stats.levels.empty()) wu = work_units(h.stats);
    write_stats_csv((out_dir / "stats.csv").string(), h.stats, wu);
    manifest["stats"] = stats_json(h.stats, wu);
    failed = h.failed;
    if (h.failed) manifest["error"] = h.error;
  }

  manifest["status"] = failed ? "FAILED" : "OK";
  std::ofstream mf(out_dir / "manifest.json");
  mf << manifest.dump(2) << "\n";
  return failed ? 1 : 0;
}

}  // namespace lcamr
