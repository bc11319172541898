#ifndef QPKAM_RUNNER_HPP
#define QPKAM_RUNNER_HPP

#include <string>

#include "qpkam/config.hpp"

namespace qpkam {

struct RunPaths {
  std::string out_dir;    // empty = config's output dir
  std::string hull_path;  // optional starting / candidate hull
  bool quiet = false;
};

// Subcommand drivers. Solver breakdowns (no convergence, lost
// non-degeneracy) are recorded in the reports with exit status 0; only
// usage, configuration and file errors exit nonzero.
int run_solve(const RunConfig& config, const RunPaths& paths);
int run_certify(const RunConfig& config, const RunPaths& paths);
int run_residual(const RunConfig& config, const RunPaths& paths);
int run_sweep(const RunConfig& config, const RunPaths& paths);

// In-memory variants used by the python bindings; return the report JSON.
std::string solve_to_json(const RunConfig& config, const std::string& hull_path = "");
std::string certify_to_json(const RunConfig& config, const std::string& hull_path = "");
std::string residual_to_json(const RunConfig& config, const std::string& hull_path = "");

}  // namespace qpkam

#endif
