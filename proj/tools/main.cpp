#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qpkam/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qpkam: spectral quasi-Newton solver and condition-number certifier for "
               "quasi-periodic hull functions of long-range particle chains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string hull_path;
  bool quiet = false;

  auto add_common = [&](CLI::App* cmd, bool with_hull) {
    cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides the config)");
    if (with_hull) cmd->add_option("--hull", hull_path, "hull coefficient file");
    cmd->add_flag("--quiet", quiet, "suppress the status line");
  };

  CLI::App* solve = app.add_subcommand("solve", "iterate the quasi-Newton step to convergence");
  add_common(solve, true);
  CLI::App* certify =
      app.add_subcommand("certify", "condition numbers and hypothesis checks for a hull");
  add_common(certify, true);
  CLI::App* residual = app.add_subcommand("residual", "equilibrium residual of a hull");
  add_common(residual, true);
  CLI::App* sweep = app.add_subcommand("sweep", "scan one scalar parameter and record breakdown");
  add_common(sweep, false);

  CLI11_PARSE(app, argc, argv);

  try {
    qpkam::RunConfig config = qpkam::load_config(config_path);
    qpkam::RunPaths paths{out_dir, hull_path, quiet};
    if (solve->parsed()) return qpkam::run_solve(config, paths);
    if (certify->parsed()) return qpkam::run_certify(config, paths);
    if (residual->parsed()) return qpkam::run_residual(config, paths);
    if (sweep->parsed()) return qpkam::run_sweep(config, paths);
  } catch (const qpkam::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
