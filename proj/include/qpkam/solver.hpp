#ifndef QPKAM_SOLVER_HPP
#define QPKAM_SOLVER_HPP

#include <string>
#include <vector>

#include "qpkam/interaction.hpp"

namespace qpkam {

// One solver iterate: zero-average hull coefficients with the radius and
// residual bookkeeping that the estimates are reported at.
struct HullState {
  FourierSeries h;
  double radius = 0.0;
  int iteration = 0;
  double residual_norm = 0.0;
  double accumulated_delta_norm = 0.0;  // sum_j ||Delta_j||, checked against margin/4
};

// Outer-iteration policy. The radius sequence R_n = R_{n-1} - (R0/4) 2^{-n}
// drains a quarter of the initial radius across the whole run.
struct StepSchedule {
  double r0 = 0.0;
  int max_iterations = 12;
  double epsilon_floor = 1e-13;
  double tail_floor_factor = 1e3;  // stop below max(floor, factor * tail mass)
};

struct StepDiagnostics {
  int iteration = 0;
  double radius_before = 0.0;
  double radius_after = 0.0;
  double kappa = 0.0;  // radius spent by this step
  // kappa/8 domain-loss split: the intermediate radii the one-step estimates
  // are bookkept at.
  double r_prime = 0.0;
  double r_double_prime = 0.0;
  double r_triple_prime = 0.0;
  double r_fourth = 0.0;
  double residual_before = 0.0;
  double residual_after = 0.0;
  double delta_norm = 0.0;        // chi
  double delta_deriv_norm = 0.0;  // chi'
  double wbar = 0.0;
  double mean_l_residual = 0.0;  // measured |<l E>| before projection
  int neumann_terms = 0;
  double tail_mass = 0.0;
  double inversion_defect = 0.0;
};

struct SolveResult {
  HullState state;
  std::vector<double> residual_history;  // eps_0 ... eps_n
  std::vector<StepDiagnostics> steps;
  bool converged = false;
  std::string stop_reason;  // Converged | MaxIterations | <ErrorCode name>
  std::string error_message;
};

// [R_1, ..., R_nmax] with R_n = R0 (1 - (1/4) sum_{i<=n} 2^-i); limit 3 R0 / 4.
std::vector<double> schedule_radii(double r0, int n_max);

// Neumann inversion of (C_{0,1,1} + G) x = w: x = sum_j (-C^-1 G)^j C^-1 w.
// Terms stop once below tol * ||w||; the defect ||(C+G)x - w|| is verified
// against 10 tol ||w||. Throws NeumannDivergence on growth or term overflow.
FourierSeries invert_C_plus_G(const Model& model, const FourierSeries& h, const FourierSeries& w,
                              double tol, int max_terms, int* terms_used = nullptr,
                              double* defect = nullptr, TailStats* tail = nullptr);

// One quasi-Newton step at the given target radius (the radius the new state
// reports its norms at). `delta_out`, when given, receives the correction
// Delta = l eta before renormalization.
HullState newton_step(const Model& model, const HullState& state, double next_radius,
                      StepDiagnostics* diag = nullptr, FourierSeries* delta_out = nullptr);

// Full outer loop from h0 (normalized to zero average). Step failures are
// recorded in the result, not thrown.
SolveResult solve(const Model& model, const FourierSeries& h0, const StepSchedule& schedule);

}  // namespace qpkam

#endif
