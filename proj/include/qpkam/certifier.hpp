#ifndef QPKAM_CERTIFIER_HPP
#define QPKAM_CERTIFIER_HPP

#include <string>
#include <vector>

#include "qpkam/solver.hpp"

namespace qpkam {

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // positive distance to the failure boundary
  std::string note;
};

// The theorem's measurable non-degeneracy data, evaluated at one hull.
// Every value is numerical evidence at the stated truncation, not a proof.
struct ConditionReport {
  double n_plus = 0.0;   // ||l||
  double n_minus = 0.0;  // ||l^-1||
  double c = 0.0;        // |<1 / (l . l o T_{-wa})>|
  double t_bound = 0.0;  // ||(d0 d1 H_1)^-1|| on the joint torus at rbar
  double u_bound = 0.0;  // |<C_{0,1,1}^-1>|^-1
  double delta = 0.0;    // exact long-range operator bound
  double nu = 0.0;
  double tau = 0.0;
  double eps0 = 0.0;  // ||E[h]||
  double h5a = 0.0;   // (N-)^2 T delta
  double h5b = 0.0;   // (N-)^2 T U / (2 pi)^d, the raw-integral U of the smallness product
  double chi = 0.0;        // ||Delta|| of the step that produced this state
  double chi_prime = 0.0;  // ||d_alpha Delta||
  double beta = 0.0;
  double radius = 0.0;
  double rbar = 0.0;
  int cutoff = 0;
  double tail_mass = 0.0;
  double t_tail = 0.0;  // weighted edge mass of the truncated inverse behind T
  std::vector<double> interaction_bounds;
  std::vector<int> bounds_estimated;  // 1 where M_L was estimated, not supplied
  std::vector<HypothesisCheck> hypotheses;
};

ConditionReport condition_numbers(const Model& model, const FourierSeries& h,
                                  const GevreyParams& g);

// H1..H5 with numeric margins; also stored into report.hypotheses.
std::vector<HypothesisCheck> check_hypotheses(ConditionReport& report, double c_floor = 1e-3);

// Post-step condition-number drift: the a-priori update bounds evaluated at
// chi/chi' versus a direct recomputation at h + delta.
struct PostStepBounds {
  double chi = 0.0;
  double chi_prime = 0.0;
  double predicted_n_plus = 0.0;
  double predicted_n_minus = 0.0;
  bool n_minus_available = false;  // requires chi' N- < 1
  double predicted_c_change = 0.0;
  double predicted_u = 0.0;
  bool u_available = false;
};

struct PostStepReport {
  PostStepBounds bounds;
  ConditionReport recomputed;
};

// Throws BoundViolated when a recomputed value exceeds its prediction beyond
// `slack` (relative).
PostStepReport post_step_diagnostics(const Model& model, const FourierSeries& h_before,
                                     const FourierSeries& delta, const ConditionReport& before,
                                     const GevreyParams& at, double slack = 1e-8);

struct ConvergenceFit {
  double slope = 0.0;
  double a_fit = 0.0;  // contraction constant from the intercept
  bool quadratic = false;
  int points_used = 0;
};

// Least-squares slope of log eps_{n+1} against log eps_n over entries above
// `floor`; quadratic convergence is declared at slope >= 1.8.
ConvergenceFit convergence_fit(const std::vector<double>& history, double floor = 0.0);

struct TranslationCheck {
  double phi = 0.0;
  double residual_norm = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

struct ProbeResult {
  int trial = 0;
  bool converged = false;
  double distance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  double base_residual_norm = 0.0;
  std::vector<TranslationCheck> translations;
  double zero_average_identity = 0.0;
  bool zero_average_pass = false;
  std::vector<ProbeResult> probes;
  bool all_pass = false;
};

// A-posteriori checks on a candidate solution: the translation family
// h(.+phi a)+phi keeps the residual within a factor 10, the weighted
// residual average vanishes, and perturbed seeds re-converge to the same
// normalized hull.
VerificationReport verify_solution(const Model& model, const FourierSeries& h_star,
                                   const std::vector<double>& phis, int reseed_trials,
                                   const StepSchedule& schedule, double probe_scale = 1e-4,
                                   double probe_tolerance = 1e-8, std::uint64_t seed = 2024);

struct SmallnessEntry {
  std::string name;
  bool satisfied = false;
  bool informational = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct SmallnessReport {
  std::vector<SmallnessEntry> entries;
  bool all_satisfied = false;
};

// Heuristic surrogates for the smallness ledger of the convergence proof,
// using the fitted contraction constant in place of the inexplicit one.
SmallnessReport smallness_report(const ConditionReport& initial, const ConditionReport& final_rep,
                                 const SolveResult& run, const Model& model,
                                 const StepSchedule& schedule);

// Deterministic pseudo-random real (Hermitian) series with zero average and
// Gevrey-decaying amplitudes, scaled to `target_norm` at (beta, radius).
FourierSeries random_series(int dim, int cutoff, double beta, double radius, double target_norm,
                            std::uint64_t seed);

}  // namespace qpkam

#endif
