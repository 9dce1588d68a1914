#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lcamr/physics.hpp"
#include "lcamr/solver.hpp"

namespace lcamr {

struct BoundaryCondition {
  std::string id;
  std::function<Eigen::Vector3d(const Eigen::Vector2d&)> g;
  std::string description;
};

struct PresetOverrides {
  double t0 = std::numeric_limits<double>::quiet_NaN();
  int nx = -1, ny = -1;         // square-domain coarse grid
  int ellipse_target = -1;      // ellipse coarse element budget
};

struct Preset {
  ProblemConfig config;
  std::shared_ptr<Mesh> coarse_mesh;
  BoundaryCondition bc;
  std::string note;  // records interpretation choices for the run manifest
};

std::vector<std::string> preset_names();

/// Presets: twist | patterned | ellipse_t6 | ellipse_t8 | constant_ellipse |
/// helix_manufactured. The formulation picks the damping start where the two
/// differ. Throws std::invalid_argument for unknown names.
Preset preset(const std::string& name, Formulation formulation,
              const PresetOverrides& overrides = {});

/// Closed-form helical field (sin(a y), 0, cos(a y)) with twist rate a.
AnalyticField helix_field(double rate);
Eigen::Vector3d helix_value(double rate, const Eigen::Vector2d& x);

/// Tabulated boundary override: rows "s g1 g2 g3" with s the arc-length
/// parameter, linearly interpolated (periodic). Points are mapped to s via
/// the mesh boundary's arc-length parameterization.
BoundaryCondition load_boundary_table(const std::string& path,
                                      const BoundaryDescriptor& boundary,
                                      const Eigen::Vector2d& rect_lo,
                                      const Eigen::Vector2d& rect_hi);

/// Arc length along the domain boundary, counter-clockwise; rectangle sides
/// start at rect_lo, the ellipse at angle 0.
double boundary_arc_length(const BoundaryDescriptor& boundary,
                           const Eigen::Vector2d& rect_lo,
                           const Eigen::Vector2d& rect_hi,
                           const Eigen::Vector2d& point);
double boundary_perimeter(const BoundaryDescriptor& boundary,
                          const Eigen::Vector2d& rect_lo,
                          const Eigen::Vector2d& rect_hi);

}  // namespace lcamr
