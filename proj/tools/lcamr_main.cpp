#include <CLI11.hpp>

#include <iostream>

#include "lcamr/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Frank-Oseen director-field solver with adaptive refinement"};
  app.require_subcommand(1);

  CLI::App* run_cmd = app.add_subcommand("run", "run a configured experiment");
  std::string config_file;
  std::string preset, formulation, refine, out_dir;
  int levels = -1;
  double flag_fraction = -1.0;
  run_cmd->add_option("config", config_file, "JSON run configuration")
      ->required();
  run_cmd->add_option("--preset", preset, "preset name override");
  run_cmd->add_option("--formulation", formulation, "penalty|lagrangian");
  run_cmd->add_option("--levels", levels, "nested-iteration grid count");
  run_cmd->add_option("--refine", refine, "adaptive|uniform|paired-both");
  run_cmd->add_option("--flag-fraction", flag_fraction,
                      "fraction of elements refined per step");
  run_cmd->add_option("--out", out_dir, "output directory");
  std::string boundary_file;
  run_cmd->add_option("--boundary-file", boundary_file,
                      "tabulated boundary director override");

  CLI11_PARSE(app, argc, argv);

  try {
    lcamr::RunConfig rc = lcamr::load_run_config(config_file);
    if (!preset.empty()) rc.preset_name = preset;
    if (!formulation.empty())
      rc.formulation = lcamr::formulation_from_string(formulation);
    if (levels > 0) rc.levels = levels;
    if (!refine.empty()) rc.mode = lcamr::mode_from_string(refine);
    if (flag_fraction > 0) rc.flag_fraction = flag_fraction;
    if (!out_dir.empty()) rc.out_dir = out_dir;
    if (!boundary_file.empty()) rc.boundary_file = boundary_file;
    return lcamr::run(rc);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
