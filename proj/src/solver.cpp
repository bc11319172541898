#include "qpkam/solver.hpp"

#include <cmath>

namespace qpkam {

namespace {

std::vector<double> step_vector(const Frequency& freq, double factor) {
  std::vector<double> t(freq.alpha.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = factor * freq.alpha[i];
  return t;
}

double divisor_floor(const Model& model) {
  const Tolerances& tol = model.tol();
  if (tol.divisor_floor > 0.0) return tol.divisor_floor;
  return default_divisor_floor(model.freq(), model.cutoff());
}

// Exact zero-average normalization through the translation family:
// g(. - c alpha) - c solves the same equation with <.> = 0 and the same
// residual norm, unlike bare mean subtraction which perturbs the residual
// at first order in c.
FourierSeries normalize_hull(const FourierSeries& g, const Frequency& freq) {
  const double c = average(g).real();
  FourierSeries out = shift(g, step_vector(freq, -c));
  out.set_coeff(Mode{}, Complex(0.0, 0.0));
  return out;
}

}  // namespace

std::vector<double> schedule_radii(double r0, int n_max) {
  if (r0 <= 0.0) throw Error(ErrorCode::InvalidArgument, "schedule needs R0 > 0");
  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(std::max(0, n_max)));
  double partial = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    partial += std::pow(2.0, -n);
    radii.push_back(r0 * (1.0 - 0.25 * partial));
  }
  return radii;
}

FourierSeries invert_C_plus_G(const Model& model, const FourierSeries& h, const FourierSeries& w,
                              double tol, int max_terms, int* terms_used, double* defect,
                              TailStats* tail) {
  const GevreyParams& g = model.gevrey();
  const double w_norm = gevrey_norm(w, g);
  FourierSeries c011 = coefficient_C(model, h, 0, 1, 1, tail);
  FourierSeries c_inv;
  try {
    c_inv = reciprocal(c011, model.grid(), model.tol().reciprocal_floor, tail);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NearSingular) {
      throw Error(ErrorCode::NondegeneracyLost,
                  std::string("C_{0,1,1} hit its pointwise floor: ") + e.what());
    }
    throw;
  }
  // O(1) coefficient fields put an absolute roundoff floor under every
  // product, independent of how small w is.
  const double machine_floor = 1e-14 * std::max(1.0, gevrey_norm(c011, g));
  const double target = tol * w_norm + 1e-300;

  // G only acts on the zero-average subspace; intermediate iterates may carry
  // a mean, which the combined solution sheds once the average constraint
  // fixes wbar, so project before every application.
  const bool has_long_range = model.max_range() >= 2;
  auto apply_operator = [&](const FourierSeries& f) {
    FourierSeries out = multiply(c011, f, model.grid(), tail);
    if (has_long_range) {
      FourierSeries f0 = f;
      f0.set_coeff(Mode{}, Complex(0.0, 0.0));
      out += apply_G(model, h, f0, tail);
    }
    return out;
  };

  // Richardson iteration preconditioned by the pointwise reciprocal: the
  // iterates reproduce the Neumann series sum_j (-C^-1 G)^j C^-1 w and also
  // close the Galerkin truncation coupling of the products.
  FourierSeries x = multiply(c_inv, w, model.grid(), tail);
  int terms = 1;
  double defect_norm = std::numeric_limits<double>::infinity();
  double prev_defect = defect_norm;
  while (true) {
    FourierSeries r = apply_operator(x);
    r -= w;
    r *= Complex(-1.0, 0.0);
    defect_norm = gevrey_norm(r, g);
    if (defect_norm <= target) break;
    if (defect_norm >= prev_defect) {
      // stalled at the roundoff floor of the products: fine if within contract
      if (defect_norm <= 10.0 * tol * w_norm + machine_floor) break;
      throw Error(ErrorCode::NeumannDivergence, "correction terms are not contracting");
    }
    if (terms >= max_terms) {
      throw Error(ErrorCode::NeumannDivergence, "Neumann series exceeded max_terms");
    }
    x += multiply(c_inv, r, model.grid(), tail);
    ++terms;
    prev_defect = defect_norm;
  }

  if (defect != nullptr) *defect = defect_norm;
  if (terms_used != nullptr) *terms_used = terms;
  if (defect_norm > 10.0 * tol * w_norm + machine_floor) {
    throw Error(ErrorCode::NeumannDivergence, "inversion defect exceeds 10 tol ||w||");
  }
  return x;
}

HullState newton_step(const Model& model, const HullState& state, double next_radius,
                      StepDiagnostics* diag, FourierSeries* delta_out) {
  const Frequency& freq = model.freq();
  const GevreyParams& gev = model.gevrey();
  const Tolerances& tol = model.tol();
  TailStats tail;

  StepDiagnostics local;
  local.iteration = state.iteration;
  local.radius_before = state.radius;
  local.radius_after = next_radius;
  local.kappa = state.radius - next_radius;
  local.r_prime = state.radius - local.kappa / 4.0;
  local.r_double_prime = local.r_prime - local.kappa / 8.0;
  local.r_triple_prime = local.r_double_prime - local.kappa / 4.0;
  local.r_fourth = local.r_triple_prime - local.kappa / 8.0;

  // Right-hand side of the first cohomology equation: l E[h], whose average
  // vanishes identically; the measured mean is a truncation artifact that is
  // logged, then projected out.
  FourierSeries res = residual(model, state.h, &tail);
  local.residual_before = gevrey_norm(res, gev.beta, state.radius);
  FourierSeries l = hull_l(state.h, freq.alpha).with_cutoff(model.cutoff());
  FourierSeries rhs = multiply(l, res, model.grid(), &tail);
  local.mean_l_residual = std::abs(average(rhs));
  rhs.set_coeff(Mode{}, Complex(0.0, 0.0));

  const double floor = divisor_floor(model);
  FourierSeries w0 = solve_cohomology(rhs, 1, freq, floor);

  // Step (2) via linearity: (C+G)^-1[w0 + wbar] = (C+G)^-1 w0 + wbar (C+G)^-1[1].
  int terms_a = 0, terms_b = 0;
  double defect_a = 0.0, defect_b = 0.0;
  FourierSeries u = invert_C_plus_G(model, state.h, w0, tol.neumann_tol, tol.neumann_max_terms,
                                    &terms_a, &defect_a, &tail);
  FourierSeries ones = FourierSeries::constant(model.dim(), model.cutoff(), Complex(1.0, 0.0));
  FourierSeries v = invert_C_plus_G(model, state.h, ones, tol.neumann_tol, tol.neumann_max_terms,
                                    &terms_b, &defect_b, &tail);
  const Complex v_mean = average(v);
  if (std::abs(v_mean) < 1e-14) {
    throw Error(ErrorCode::NondegeneracyLost, "<(C+G)^-1[1]> is numerically zero");
  }
  const double wbar = -(average(u) / v_mean).real();
  local.wbar = wbar;
  local.neumann_terms = terms_a + terms_b;
  local.inversion_defect = std::max(defect_a, defect_b);

  // Steps (3)-(4): the combined inverse is u + wbar v, zero-average by the
  // choice of wbar; solve the second cohomology equation.
  FourierSeries combined = u;
  combined += v * Complex(wbar, 0.0);
  combined.set_coeff(Mode{}, Complex(0.0, 0.0));  // roundoff-level projection
  FourierSeries eta = solve_cohomology(combined, -1, freq, floor);

  // Step (5): Delta = l eta, then renormalize through the translation family.
  FourierSeries delta = multiply(l, eta, model.grid(), &tail);
  local.delta_norm = gevrey_norm(delta, gev.beta, next_radius);
  local.delta_deriv_norm =
      gevrey_norm(directional_derivative(delta, freq.alpha), gev.beta, next_radius);

  const double new_accumulated = state.accumulated_delta_norm + local.delta_norm;
  if (new_accumulated > 0.25 * gev.margin) {
    throw Error(ErrorCode::CompositionDomainExceeded,
                "accumulated correction norm exceeds margin/4");
  }
  if (!compose_check(model, state.h, local.delta_norm, next_radius)) {
    throw Error(ErrorCode::CompositionDomainExceeded,
                "candidate correction leaves the composition domain");
  }

  HullState next;
  FourierSeries g = state.h.with_cutoff(model.cutoff());
  g += delta;
  next.h = normalize_hull(g, freq);
  next.radius = next_radius;
  next.iteration = state.iteration + 1;
  next.accumulated_delta_norm = new_accumulated;
  TailStats res_tail;
  next.residual_norm = gevrey_norm(residual(model, next.h, &res_tail), gev.beta, next_radius);
  tail += res_tail;

  local.residual_after = next.residual_norm;
  local.tail_mass = tail.dropped_mass;
  if (diag != nullptr) *diag = local;
  if (delta_out != nullptr) *delta_out = std::move(delta);
  return next;
}

SolveResult solve(const Model& model, const FourierSeries& h0, const StepSchedule& schedule) {
  SolveResult result;
  const GevreyParams& gev = model.gevrey();

  HullState state;
  state.h = normalize_hull(h0.with_cutoff(model.cutoff()), model.freq());
  state.radius = schedule.r0 > 0.0 ? schedule.r0 : gev.radius;
  state.iteration = 0;

  std::vector<double> radii = schedule_radii(state.radius, schedule.max_iterations);

  try {
    TailStats tail0;
    state.residual_norm =
        gevrey_norm(residual(model, state.h, &tail0), gev.beta, state.radius);
    result.residual_history.push_back(state.residual_norm);

    double tail_floor = schedule.tail_floor_factor * tail0.dropped_mass;
    for (int n = 0; n < schedule.max_iterations; ++n) {
      const double stop_at = std::max(schedule.epsilon_floor, tail_floor);
      if (state.residual_norm <= stop_at) break;

      StepDiagnostics diag;
      HullState next = newton_step(model, state, radii[static_cast<std::size_t>(n)], &diag);
      result.steps.push_back(diag);
      result.residual_history.push_back(next.residual_norm);
      tail_floor = schedule.tail_floor_factor * diag.tail_mass;

      // Stagnation above the floor means the smallness assumptions failed.
      if (next.residual_norm > 0.9 * state.residual_norm &&
          next.residual_norm > std::max(schedule.epsilon_floor, tail_floor)) {
        state = next;
        throw Error(ErrorCode::NoConvergence, "residual is not contracting");
      }
      state = next;
    }
    result.state = state;
    result.converged =
        state.residual_norm <= std::max(schedule.epsilon_floor, tail_floor);
    result.stop_reason = result.converged ? "Converged" : "MaxIterations";
    if (!result.converged) {
      result.error_message = "residual above floor after max_iterations";
    }
  } catch (const Error& e) {
    result.state = state;
    result.converged = false;
    result.stop_reason = error_code_name(e.code());
    result.error_message = e.what();
  }
  return result;
}

}  // namespace qpkam
