#include "qpkam/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace qpkam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> scaled_alpha(const Frequency& freq, double factor) {
  std::vector<double> t(freq.alpha.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = factor * freq.alpha[i];
  return t;
}

double sum_range1_bounds(const Model& model) {
  double m1 = 0.0;
  for (std::size_t i = 0; i < model.interactions().size(); ++i) {
    if (model.interactions()[i].range == 1) m1 += model.interaction_bound(i);
  }
  return m1;
}

}  // namespace

ConditionReport condition_numbers(const Model& model, const FourierSeries& h,
                                  const GevreyParams& g) {
  ConditionReport rep;
  rep.beta = g.beta;
  rep.radius = g.radius;
  rep.rbar = model.rbar();
  rep.cutoff = model.cutoff();
  rep.nu = model.freq().nu;
  rep.tau = model.freq().tau;
  for (std::size_t i = 0; i < model.interactions().size(); ++i) {
    rep.interaction_bounds.push_back(model.interaction_bound(i));
    rep.bounds_estimated.push_back(model.interaction_bound_estimated(i) ? 1 : 0);
  }

  TailStats tail;
  const FourierSeries hull = h.cutoff() == model.cutoff() ? h : h.with_cutoff(model.cutoff());
  const FourierSeries l = hull_l(hull, model.freq().alpha);
  rep.n_plus = gevrey_norm(l, g);

  FourierSeries l_inv;
  try {
    l_inv = reciprocal(l, model.grid(), model.tol().reciprocal_floor, &tail);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NearSingular) {
      throw Error(ErrorCode::NondegeneracyLost, std::string("l is not invertible: ") + e.what());
    }
    throw;
  }
  rep.n_minus = gevrey_norm(l_inv, g);

  FourierSeries pair = multiply(l, shift(l, scaled_alpha(model.freq(), -model.freq().omega)),
                                model.grid(), &tail);
  FourierSeries pair_inv;
  try {
    pair_inv = reciprocal(pair, model.grid(), model.tol().reciprocal_floor, &tail);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NearSingular) {
      throw Error(ErrorCode::NondegeneracyLost,
                  std::string("l . l o T_{-wa} is not invertible: ") + e.what());
    }
    throw;
  }
  rep.c = std::abs(average(pair_inv));

  // T from the uncomposed mixed derivative on the joint torus.
  try {
    MixedInverseBound mb = mixed_inverse_bound(model, model.tol().reciprocal_floor);
    rep.t_bound = mb.bound;
    rep.t_tail = mb.tail_weighted;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NearSingular) {
      throw Error(ErrorCode::NondegeneracyLost,
                  std::string("mixed derivative of H_1 is not pointwise invertible: ") +
                      e.what());
    }
    throw;
  }

  bool has_range1 = false;
  for (const Interaction& inter : model.interactions()) has_range1 |= inter.range == 1;
  if (has_range1) {
    FourierSeries c011 = coefficient_C(model, hull, 0, 1, 1, &tail);
    try {
      FourierSeries c_inv = reciprocal(c011, model.grid(), model.tol().reciprocal_floor, &tail);
      const double mean = std::abs(average(c_inv));
      rep.u_bound = mean > 0.0 ? 1.0 / mean : kInf;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NearSingular) {
        throw Error(ErrorCode::NondegeneracyLost,
                    std::string("C_{0,1,1} is not invertible: ") + e.what());
      }
      throw;
    }
  } else {
    rep.u_bound = kInf;
  }

  rep.delta = delta_bound(model, rep.n_plus);
  rep.eps0 = gevrey_norm(residual(model, hull, &tail), g);
  rep.h5a = rep.n_minus * rep.n_minus * rep.t_bound * rep.delta;
  if (rep.delta == 0.0 && !std::isfinite(rep.t_bound)) rep.h5a = kInf;
  // The U entering the smallness product is the reciprocal of the raw torus
  // integral, a (2 pi)^d below the averaged condition number reported above.
  const double volume = std::pow(2.0 * std::numbers::pi, model.dim());
  rep.h5b = rep.n_minus * rep.n_minus * (rep.u_bound / volume) * rep.t_bound;
  rep.tail_mass = tail.dropped_mass;
  return rep;
}

std::vector<HypothesisCheck> check_hypotheses(ConditionReport& report, double c_floor) {
  std::vector<HypothesisCheck> checks;

  HypothesisCheck h1{"H1", report.nu > 0.0, report.nu,
                     "Diophantine constant from the lattice scan"};
  checks.push_back(h1);

  const bool h2_finite = std::isfinite(report.n_plus) && std::isfinite(report.n_minus);
  HypothesisCheck h2{"H2", h2_finite && report.c >= c_floor, report.c - c_floor,
                     "finite N+, N-; c above its floor"};
  checks.push_back(h2);

  bool h3_finite = std::isfinite(report.delta);
  for (double m : report.interaction_bounds) h3_finite = h3_finite && std::isfinite(m);
  HypothesisCheck h3{"H3", h3_finite, h3_finite ? 1.0 : -1.0, "finite M_L and delta"};
  checks.push_back(h3);

  const bool h4_ok = std::isfinite(report.t_bound) && std::isfinite(report.u_bound);
  HypothesisCheck h4{"H4", h4_ok, h4_ok ? 1.0 : -1.0, "finite T and U"};
  checks.push_back(h4);

  const double worst = std::max(report.h5a, report.h5b);
  HypothesisCheck h5{"H5", worst < 0.5, 0.5 - worst, "(N-)^2 T delta and (N-)^2 U T below 1/2"};
  checks.push_back(h5);

  report.hypotheses = checks;
  return checks;
}

PostStepReport post_step_diagnostics(const Model& model, const FourierSeries& h_before,
                                     const FourierSeries& delta, const ConditionReport& before,
                                     const GevreyParams& at, double slack) {
  PostStepReport out;
  PostStepBounds& b = out.bounds;
  b.chi = gevrey_norm(delta, at);
  b.chi_prime = gevrey_norm(directional_derivative(delta, model.freq().alpha), at);

  b.predicted_n_plus = before.n_plus + b.chi_prime;
  if (b.chi_prime * before.n_minus < 1.0) {
    b.n_minus_available = true;
    b.predicted_n_minus = before.n_minus + b.chi_prime * before.n_minus * before.n_minus /
                                               (1.0 - b.chi_prime * before.n_minus);
  } else {
    b.n_minus_available = false;
    b.predicted_n_minus = kInf;
  }
  const double nm_tilde = b.n_minus_available ? b.predicted_n_minus : kInf;
  b.predicted_c_change = nm_tilde * nm_tilde * before.n_minus * before.n_minus * b.chi_prime *
                         (2.0 * before.n_plus + b.chi_prime);

  const double m1 = sum_range1_bounds(model);
  const double s = 3.0 * before.n_minus * before.n_minus * before.t_bound * m1 *
                   (before.n_plus * before.n_plus + before.n_plus) * b.chi_prime;
  if (s < 0.5 && std::isfinite(s)) {
    b.u_available = true;
    b.predicted_u = before.u_bound * (1.0 - s) / (1.0 - 2.0 * s);
  } else {
    b.u_available = false;
    b.predicted_u = kInf;
  }

  FourierSeries h_after = h_before.with_cutoff(model.cutoff());
  h_after += delta.with_cutoff(model.cutoff());
  out.recomputed = condition_numbers(model, h_after, at);
  check_hypotheses(out.recomputed);
  out.recomputed.chi = b.chi;
  out.recomputed.chi_prime = b.chi_prime;

  auto check = [&](double got, double predicted, const char* what) {
    if (!std::isfinite(predicted)) return;  // bound unavailable, flagged above
    if (got > predicted * (1.0 + slack) + slack) {
      throw Error(ErrorCode::BoundViolated, std::string(what) + " exceeds its update bound");
    }
  };
  check(out.recomputed.n_plus, b.predicted_n_plus, "N+");
  if (b.n_minus_available) check(out.recomputed.n_minus, b.predicted_n_minus, "N-");
  check(std::abs(out.recomputed.c - before.c), b.predicted_c_change, "|c change|");
  if (b.u_available && std::isfinite(before.u_bound)) {
    check(out.recomputed.u_bound, b.predicted_u, "U");
  }
  return out;
}

ConvergenceFit convergence_fit(const std::vector<double>& history, double floor) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i + 1 < history.size(); ++i) {
    if (history[i] > floor && history[i + 1] > floor) {
      xs.push_back(std::log(history[i]));
      ys.push_back(std::log(history[i + 1]));
    }
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::InsufficientHistory,
                "convergence fit needs at least 3 residuals above the floor");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) {
    throw Error(ErrorCode::InsufficientHistory, "degenerate residual history");
  }
  ConvergenceFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.a_fit = std::exp((sy - fit.slope * sx) / n);
  fit.quadratic = fit.slope >= 1.8;
  fit.points_used = static_cast<int>(xs.size()) + 1;
  return fit;
}

VerificationReport verify_solution(const Model& model, const FourierSeries& h_star,
                                   const std::vector<double>& phis, int reseed_trials,
                                   const StepSchedule& schedule, double probe_scale,
                                   double probe_tolerance, std::uint64_t seed) {
  VerificationReport rep;
  const GevreyParams& g = model.gevrey();
  const double half_radius = 0.5 * g.radius;

  FourierSeries res_star = residual(model, h_star);
  rep.base_residual_norm = gevrey_norm(res_star, g);
  bool all = true;

  for (double phi : phis) {
    FourierSeries shifted = shift(h_star, scaled_alpha(model.freq(), phi));
    shifted.add_coeff(Mode{}, Complex(phi, 0.0));
    TranslationCheck tc;
    tc.phi = phi;
    tc.residual_norm = gevrey_norm(residual(model, shifted), g);
    tc.ratio = tc.residual_norm / std::max(rep.base_residual_norm, 1e-300);
    tc.pass = tc.residual_norm <= 10.0 * rep.base_residual_norm + 1e-300;
    all = all && tc.pass;
    rep.translations.push_back(tc);
  }

  const FourierSeries l_star = hull_l(h_star.with_cutoff(model.cutoff()), model.freq().alpha);
  FourierSeries weighted = multiply(l_star, res_star.with_cutoff(model.cutoff()), model.grid());
  rep.zero_average_identity = std::abs(average(weighted));
  // relative to the residual, with an absolute floor for residuals that are
  // themselves pure roundoff
  rep.zero_average_pass =
      rep.zero_average_identity <=
      model.tol().zero_average_tol * rep.base_residual_norm + 1e-14;
  all = all && rep.zero_average_pass;

  for (int trial = 0; trial < reseed_trials; ++trial) {
    // Perturb inside the resolved band: a full-band rough seed would raise
    // the solver's truncation-noise floor above the probe tolerance.
    const int probe_cutoff = std::min(model.cutoff() / 2, 8);
    FourierSeries pert = random_series(model.dim(), std::max(probe_cutoff, 1), g.beta, g.radius,
                                       1.0, seed + static_cast<std::uint64_t>(trial));
    const double norm_half = gevrey_norm(pert, g.beta, half_radius);
    pert *= Complex(probe_scale / std::max(norm_half, 1e-300), 0.0);
    FourierSeries seed_hull = h_star.with_cutoff(model.cutoff());
    seed_hull += pert;
    SolveResult run = solve(model, seed_hull, schedule);
    ProbeResult pr;
    pr.trial = trial;
    pr.converged = run.converged;
    FourierSeries diff = run.state.h;
    diff -= h_star.with_cutoff(model.cutoff());
    pr.distance = gevrey_norm(diff, g.beta, half_radius);
    pr.pass = pr.converged && pr.distance <= probe_tolerance;
    all = all && pr.pass;
    rep.probes.push_back(pr);
  }

  rep.all_pass = all;
  return rep;
}

SmallnessReport smallness_report(const ConditionReport& initial, const ConditionReport& final_rep,
                                 const SolveResult& run, const Model& model,
                                 const StepSchedule& schedule) {
  SmallnessReport rep;
  const double beta = model.gevrey().beta;
  const double tau = model.freq().tau;
  const double d = static_cast<double>(model.dim());
  const double c3 = beta + 4.0 * tau * beta + 4.0 * (beta - 1.0) * d + 4.0 * beta * d;

  double a_fit = 0.0;
  bool have_fit = false;
  std::string fit_note = "fitted contraction constant (heuristic surrogate)";
  try {
    ConvergenceFit fit = convergence_fit(run.residual_history, schedule.epsilon_floor);
    a_fit = fit.a_fit;
    have_fit = true;
  } catch (const Error&) {
    fit_note = "no fit: residual history at the truncation floor";
  }

  const double eps0 = initial.eps0;
  auto add = [&](std::string name, bool ok, double value, double threshold, std::string note,
                 bool info = false) {
    rep.entries.push_back({std::move(name), ok, info, value, threshold, std::move(note)});
  };

  if (have_fit) {
    add("A_fit*eps0 < 1", a_fit * eps0 < 1.0, a_fit * eps0, 1.0, fit_note);
    add("2^(C3/2)*A_fit*eps0 <= 1/2", std::pow(2.0, 0.5 * c3) * a_fit * eps0 <= 0.5,
        std::pow(2.0, 0.5 * c3) * a_fit * eps0, 0.5, fit_note);
  } else {
    const bool at_floor = eps0 <= schedule.epsilon_floor || run.residual_history.size() <= 2;
    add("A_fit*eps0 < 1", at_floor, eps0, 1.0, fit_note);
    add("2^(C3/2)*A_fit*eps0 <= 1/2", at_floor, eps0, 0.5, fit_note);
  }
  add("sum ||Delta_j|| <= margin/4",
      run.state.accumulated_delta_norm <= 0.25 * model.gevrey().margin,
      run.state.accumulated_delta_norm, 0.25 * model.gevrey().margin,
      "composition budget along the run");
  add("N+ doubling margin", final_rep.n_plus <= 2.0 * initial.n_plus, final_rep.n_plus,
      2.0 * initial.n_plus, "condition numbers stay within factor 2");
  add("N- doubling margin", final_rep.n_minus <= 2.0 * initial.n_minus, final_rep.n_minus,
      2.0 * initial.n_minus, "condition numbers stay within factor 2");
  add("c halving margin", final_rep.c >= 0.5 * initial.c, final_rep.c, 0.5 * initial.c,
      "condition numbers stay within factor 2");
  if (std::isfinite(initial.u_bound) && std::isfinite(final_rep.u_bound)) {
    add("U doubling margin", final_rep.u_bound <= 2.0 * initial.u_bound, final_rep.u_bound,
        2.0 * initial.u_bound, "condition numbers stay within factor 2");
  }
  const double nu4 = std::pow(initial.nu, 4);
  add("eps0 / nu^4", true, nu4 > 0.0 ? eps0 / nu4 : 0.0, 0.0,
      "informational: admissible residual scales like nu^4", true);

  bool all = true;
  for (const SmallnessEntry& e : rep.entries) all = all && (e.satisfied || e.informational);
  rep.all_satisfied = all;
  return rep;
}

FourierSeries random_series(int dim, int cutoff, double beta, double radius, double target_norm,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FourierSeries f(dim, cutoff);
  for (std::int64_t i = 0; i < f.table_size(); ++i) {
    Mode k = f.mode_at(i);
    int first_nonzero = 0;
    for (int c = 0; c < dim; ++c) {
      if (k[c] != 0) {
        first_nonzero = k[c];
        break;
      }
    }
    if (first_nonzero <= 0) continue;  // half lattice; mirror fills the rest
    const double decay = std::exp(-beta * radius * k_weight(k, dim, beta));
    const Complex c(gauss(rng) * decay, gauss(rng) * decay);
    f.set_coeff(k, c);
    Mode mk{};
    for (int a = 0; a < dim; ++a) mk[a] = -k[a];
    f.set_coeff(mk, std::conj(c));
  }
  const double norm = gevrey_norm(f, beta, radius);
  if (norm > 0.0) f *= Complex(target_norm / norm, 0.0);
  return f;
}

}  // namespace qpkam
