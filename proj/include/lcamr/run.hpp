#pragma once

#include <limits>
#include <string>

#include "lcamr/problems.hpp"

namespace lcamr {

struct RunConfig {
  std::string preset_name = "twist";
  Formulation formulation = Formulation::penalty;
  int levels = 1;
  enum class Mode { adaptive, uniform, paired_both } mode = Mode::adaptive;
  double flag_fraction = std::numeric_limits<double>::quiet_NaN();
  std::string out_dir = "out";
  unsigned seed = 0;

  // Preset overrides; NaN / -1 keep the preset defaults.
  double t0 = std::numeric_limits<double>::quiet_NaN();
  double zeta = std::numeric_limits<double>::quiet_NaN();
  double alpha0 = std::numeric_limits<double>::quiet_NaN();
  double alpha_delta = std::numeric_limits<double>::quiet_NaN();
  double newton_tol = std::numeric_limits<double>::quiet_NaN();
  int max_newton_iters = -1;
  int nx = -1, ny = -1;
  int ellipse_target = -1;
  std::string boundary_file;
};

std::string to_string(RunConfig::Mode m);
RunConfig::Mode mode_from_string(const std::string& s);

/// Parses the structured plain-text (JSON) config file. Unknown keys are
/// rejected so typos do not silently fall back to defaults.
RunConfig load_run_config(const std::string& path);

/// Executes the configured experiment: stats CSV per hierarchy (adaptive and
/// uniform suffixes in paired mode), per-level VTK field files, and a
/// manifest.json echoing every resolved parameter. Returns the process exit
/// status; on solver failure partial outputs are kept and the manifest is
/// marked FAILED.
int run(const RunConfig& config);

}  // namespace lcamr
