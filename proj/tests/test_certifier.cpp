#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace qpkam;
using namespace qpkam::testing;

namespace {

Model twist_model(double a, int cutoff = 12) {
  std::vector<Interaction> inters{twist_interaction(a)};
  return Model(std::move(inters), desk_frequency(2 * cutoff), desk_gevrey(), cutoff);
}

}  // namespace

TEST_CASE("condition numbers of the trivial twist chain") {
  {
    Model model = twist_model(1.0);
    ConditionReport rep = condition_numbers(model, model.zero_series(), model.gevrey());
    CHECK(rep.n_plus == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rep.n_minus == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rep.c == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rep.t_bound == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rep.u_bound == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rep.delta == 0.0);
    CHECK(rep.eps0 < 1e-14);
    CHECK(rep.n_plus * rep.n_minus >= 1.0 - 1e-12);
  }
  {
    Model model = twist_model(2.0);
    ConditionReport rep = condition_numbers(model, model.zero_series(), model.gevrey());
    CHECK(rep.t_bound == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(rep.u_bound == doctest::Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("N+ obeys the triangle bound for small hulls") {
  Model model = twist_model(1.0);
  FourierSeries h = random_series(2, 6, 2.0, 0.4, 0.05, 4000).with_cutoff(12);
  ConditionReport rep = condition_numbers(model, h, model.gevrey());
  const double dnorm =
      gevrey_norm(directional_derivative(h, model.freq().alpha), model.gevrey());
  CHECK(rep.n_plus <= 1.0 + dnorm + 1e-12);
  CHECK(rep.n_plus * rep.n_minus >= 1.0 - 1e-12);
}

TEST_CASE("T with a periodic mixed-derivative correction matches the 1-D oracle") {
  // H_1 = twist + c cos(e.(zeta_1 - zeta_0)), e = (1, 0):
  // mixed derivative a + c (e.alpha)^2 cos(t) along the difference line.
  const double a = 1.0, c = 0.1;
  Interaction kernel;
  kernel.range = 1;
  kernel.twist = a;
  {
    InteractionTerm term;
    term.coeff = c;
    Factor fac;
    fac.kind = Factor::Kind::Difference;
    fac.site_a = 1;
    fac.site_b = 0;
    fac.direction = {1, 0};
    fac.series = FourierSeries(1, 1);
    fac.series.set_coeff(make_mode({1}), Complex(0.5, 0.0));
    fac.series.set_coeff(make_mode({-1}), Complex(0.5, 0.0));
    term.factors.push_back(fac);
    kernel.terms.push_back(term);
  }
  std::vector<Interaction> inters{kernel};
  Model model(std::move(inters), desk_frequency(24), desk_gevrey(), 12);
  ConditionReport rep = condition_numbers(model, model.zero_series(), model.gevrey());

  // 1/(a + lambda cos t) expanded in 1-D, then weighted on the joint lattice
  const double ea = model.freq().alpha[0];
  const double lambda = c * ea * ea;
  const int n = 4096;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    vals[i] = 1.0 / (a + lambda * std::cos(2.0 * std::numbers::pi * i / n));
  }
  // The weighted sum amplifies coefficient noise; both sides are only
  // meaningful down to the double-precision floor, so compare at 1e-5 over
  // the modes that sit clearly above it.
  const double beta = model.gevrey().beta, rbar = model.rbar();
  double expected = 0.0;
  for (int m = -12; m <= 12; ++m) {
    Complex cm(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      cm += vals[i] * std::polar(1.0, -2.0 * std::numbers::pi * m * i / n);
    }
    cm /= static_cast<double>(n);
    // joint mode (m e, -m e): weight carries both blocks
    expected += std::abs(cm) *
                std::exp(beta * rbar * 2.0 * std::pow(std::abs(static_cast<double>(m)), 1.0 / beta));
  }
  CHECK(rep.t_bound == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("hypothesis checks and margins") {
  Model model = twist_model(1.0);
  ConditionReport rep = condition_numbers(model, model.zero_series(), model.gevrey());
  std::vector<HypothesisCheck> checks = check_hypotheses(rep);
  for (const HypothesisCheck& h : checks) CHECK(h.pass);

  ConditionReport bad = rep;
  bad.h5a = 0.6;
  std::vector<HypothesisCheck> failed = check_hypotheses(bad);
  CHECK_FALSE(failed[4].pass);
  CHECK(failed[4].margin == doctest::Approx(-0.1).epsilon(1e-12));

  ConditionReport nonu = rep;
  nonu.nu = 0.0;
  std::vector<HypothesisCheck> h1fail = check_hypotheses(nonu);
  CHECK_FALSE(h1fail[0].pass);
}

TEST_CASE("hypothesis checks are monotone in eps0 and delta") {
  Model model = twist_model(1.0);
  ConditionReport rep = condition_numbers(model, model.zero_series(), model.gevrey());
  check_hypotheses(rep);
  ConditionReport worse = rep;
  worse.eps0 *= 1e6;
  worse.delta += 10.0;
  worse.h5a = worse.n_minus * worse.n_minus * worse.t_bound * worse.delta;
  std::vector<HypothesisCheck> before = check_hypotheses(rep);
  std::vector<HypothesisCheck> after = check_hypotheses(worse);
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (!before[i].pass) CHECK_FALSE(after[i].pass);
  }
}

TEST_CASE("post-step diagnostics: predictions dominate recomputation") {
  Model model = desk_model(0.01, 12);
  FourierSeries h = random_series(2, 5, 2.0, 0.4, 0.02, 4100).with_cutoff(12);
  ConditionReport before = condition_numbers(model, h, model.gevrey());

  // zero update: bounds collapse onto the current values
  PostStepReport same =
      post_step_diagnostics(model, h, model.zero_series(), before, model.gevrey());
  CHECK(same.bounds.chi == 0.0);
  CHECK(same.bounds.predicted_n_plus == doctest::Approx(before.n_plus).epsilon(1e-13));
  CHECK(same.bounds.predicted_n_minus == doctest::Approx(before.n_minus).epsilon(1e-13));
  CHECK(same.recomputed.n_plus == doctest::Approx(before.n_plus).epsilon(1e-12));

  // small random update: recomputed values stay below the a-priori bounds
  FourierSeries delta = random_series(2, 5, 2.0, 0.4, 5e-3, 4101).with_cutoff(12);
  PostStepReport rep = post_step_diagnostics(model, h, delta, before, model.gevrey());
  CHECK(rep.bounds.n_minus_available);
  CHECK(rep.recomputed.n_plus <= rep.bounds.predicted_n_plus * (1.0 + 1e-9));
  CHECK(rep.recomputed.n_minus <= rep.bounds.predicted_n_minus * (1.0 + 1e-9));
  CHECK(std::abs(rep.recomputed.c - before.c) <= rep.bounds.predicted_c_change + 1e-12);

  // an understated starting report must be caught
  ConditionReport lying = before;
  lying.n_plus = 0.5 * before.n_plus;
  CHECK_THROWS_AS(post_step_diagnostics(model, h, delta, lying, model.gevrey()), Error);

  // chi' N- >= 1 makes the N- update bound unavailable
  ConditionReport huge = before;
  huge.n_minus = 1e12;
  FourierSeries big = random_series(2, 5, 2.0, 0.4, 0.5, 4102).with_cutoff(12);
  PostStepReport flagged = post_step_diagnostics(model, h, big, huge, model.gevrey());
  CHECK_FALSE(flagged.bounds.n_minus_available);
}

TEST_CASE("convergence fit on synthetic histories") {
  std::vector<double> quad;
  for (int n = 0; n <= 4; ++n) quad.push_back(std::pow(0.5, std::pow(2.0, n)));
  ConvergenceFit fit = convergence_fit(quad);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.a_fit == doctest::Approx(1.0).epsilon(1e-10));  // A eps0 = 1/2 at eps0 = 1/2
  CHECK(fit.quadratic);

  std::vector<double> linear;
  for (int n = 0; n <= 6; ++n) linear.push_back(std::pow(2.0, -n));
  ConvergenceFit lin = convergence_fit(linear);
  CHECK(lin.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(lin.quadratic);

  CHECK_THROWS_AS(convergence_fit({1.0, 0.5}), Error);
}

TEST_CASE("verification of exact and computed solutions") {
  {
    Model model = twist_model(1.0);
    StepSchedule schedule;
    schedule.r0 = 0.4;
    VerificationReport rep =
        verify_solution(model, model.zero_series(), {0.1, 0.7}, 0, schedule);
    CHECK(rep.base_residual_norm == 0.0);
    for (const TranslationCheck& t : rep.translations) {
      CHECK(t.residual_norm == 0.0);
      CHECK(t.pass);
    }
    CHECK(rep.zero_average_identity == 0.0);
    CHECK(rep.all_pass);
  }
  {
    Model model = desk_model(0.01, 16);
    StepSchedule schedule;
    schedule.r0 = 0.4;
    schedule.max_iterations = 10;
    SolveResult run = solve(model, model.zero_series(), schedule);
    REQUIRE(run.converged);
    VerificationReport rep =
        verify_solution(model, run.state.h, {0.3}, 2, schedule, 1e-4, 1e-8, 99);
    CHECK(rep.all_pass);
    CHECK(rep.translations[0].ratio <= 10.0);
    for (const ProbeResult& p : rep.probes) {
      CHECK(p.converged);
      CHECK(p.distance <= 1e-8);
    }
  }
}

TEST_CASE("translation ratios are invariant under re-normalizing the hull") {
  Model model = desk_model(0.01, 16);
  StepSchedule schedule;
  schedule.r0 = 0.4;

  // A hull with a residual far above the truncation floor keeps the ratios
  // deterministic; the family map h(. + phi a) + phi gives the other
  // representative of the same state.
  FourierSeries h = random_series(2, 6, 2.0, 0.4, 0.03, 4400).with_cutoff(16);
  const double phi = 0.05;
  std::vector<double> pa{phi * model.freq().alpha[0], phi * model.freq().alpha[1]};
  FourierSeries variant = shift(h, pa);
  variant.add_coeff(Mode{}, Complex(phi, 0.0));

  VerificationReport a = verify_solution(model, h, {0.1, 0.7}, 0, schedule);
  VerificationReport b = verify_solution(model, variant, {0.1, 0.7}, 0, schedule);
  for (std::size_t i = 0; i < a.translations.size(); ++i) {
    CHECK(rel_diff(a.translations[i].ratio, b.translations[i].ratio) < 1e-6);
  }
}

TEST_CASE("smallness surrogates") {
  Model model = twist_model(1.0);
  StepSchedule schedule;
  schedule.r0 = 0.4;
  SolveResult run = solve(model, model.zero_series(), schedule);
  ConditionReport rep = condition_numbers(model, run.state.h, model.gevrey());
  check_hypotheses(rep);
  SmallnessReport sm = smallness_report(rep, rep, run, model, schedule);
  CHECK(sm.all_satisfied);
  bool has_nu4 = false;
  for (const SmallnessEntry& e : sm.entries) has_nu4 = has_nu4 || e.name == "eps0 / nu^4";
  CHECK(has_nu4);

  // blowing up the starting residual must break at least one surrogate
  Model desk = desk_model(0.01, 16);
  SolveResult desk_run = solve(desk, desk.zero_series(), schedule);
  ConditionReport initial = condition_numbers(desk, desk.zero_series(), desk.gevrey());
  ConditionReport final_rep = condition_numbers(desk, desk_run.state.h, desk.gevrey());
  initial.eps0 *= 1e6;
  SmallnessReport stressed = smallness_report(initial, final_rep, desk_run, desk, schedule);
  bool any_fail = false;
  for (const SmallnessEntry& e : stressed.entries) {
    any_fail = any_fail || (!e.satisfied && !e.informational);
  }
  CHECK(any_fail);
}
