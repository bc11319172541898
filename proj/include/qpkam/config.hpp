#ifndef QPKAM_CONFIG_HPP
#define QPKAM_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "qpkam/certifier.hpp"
#include "qpkam/interaction.hpp"
#include "qpkam/solver.hpp"

namespace qpkam {

struct FrequencyConfig {
  std::vector<double> alpha;
  double omega = 0.0;
  double tau = 0.0;
  double tau0 = 0.0;  // 0 = reuse tau
  int kmax = 0;       // 0 = twice the truncation cutoff
};

struct GevreyConfig {
  double beta = 0.0;
  double r0 = 0.0;
  double iota = 0.0;
};

struct TruncationConfig {
  int cutoff = 0;
  int padding = 2;
  Tolerances tol;
};

struct ScheduleConfig {
  int max_iterations = 12;
  double epsilon_floor = 1e-13;
  double tail_floor_factor = 1e3;
  bool ignore_hypotheses = false;  // proceed with a warning when H1-H5 fail
};

struct VerifyConfig {
  std::vector<double> phis{0.1, 0.3, 0.7};
  int reseed_trials = 0;
  double probe_scale = 1e-4;
  double probe_tolerance = 1e-8;
  std::uint64_t seed = 2024;
};

struct SweepConfig {
  std::string parameter;      // "amplitude" or "omega"
  int interaction_index = 0;  // amplitude sweeps scale this interaction's terms
  std::vector<double> values;
};

struct RunConfig {
  FrequencyConfig frequency;
  GevreyConfig gevrey;
  TruncationConfig truncation;
  std::vector<Interaction> interactions;
  bool allow_degenerate_twist = false;
  ScheduleConfig schedule;
  VerifyConfig verify;
  std::optional<SweepConfig> sweep;
  std::string output_dir = "out";

  Model make_model() const;
  StepSchedule make_schedule() const;
};

// Parses and validates; ValidationError carries every violation, not just
// the first. ParseError for unreadable files or malformed JSON.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& json_text);

}  // namespace qpkam

#endif
