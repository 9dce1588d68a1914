#pragma once

#include <string>
#include <vector>

#include "lcamr/fe.hpp"
#include "lcamr/solver.hpp"

namespace lcamr {

/// Legacy VTK ASCII unstructured grid (cell type 9). The field variant adds
/// the director as vertex point data and per-cell energy density, estimator
/// value and refinement flag.
void write_mesh_vtk(const std::string& path, const Mesh& mesh);
void write_fields_vtk(const std::string& path, const DirectorState& state,
                      const std::vector<double>& wf_mean,
                      const std::vector<double>& theta,
                      const std::vector<bool>& refine_flags);

/// Loss-free plain-text mesh snapshot (vertices, elements, hanging records,
/// boundary descriptor) for regression fixtures.
void write_mesh_snapshot(const std::string& path, const Mesh& mesh);
Mesh read_mesh_snapshot(const std::string& path);

/// stats.csv mirroring the experiment tables: one row per level with columns
/// level, energy_G, energy_wF, max_dev, min_dev, dofs, newton_iters,
/// global_estimate; footer rows fine_dof, WU, wall_time. Values use
/// 6-significant-digit scientific notation.
void write_stats_csv(const std::string& path, const SolveStats& stats,
                     double wu);

struct ParsedStats {
  struct Row {
    int level;
    double energy_G, energy_wF, max_dev, min_dev;
    int dofs, newton_iters;
    double global_estimate;
  };
  std::vector<Row> rows;
  int fine_dof = 0;
  double wu = 0.0;
  double wall_time = 0.0;
};

ParsedStats parse_stats_csv(const std::string& path);

}  // namespace lcamr
