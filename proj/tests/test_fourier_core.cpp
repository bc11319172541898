#include <cmath>
#include <random>

#include "doctest.h"
#include "qpkam/grid.hpp"
#include "support.hpp"

using namespace qpkam;
using namespace qpkam::testing;

TEST_CASE("k_weight matches the anisotropic mode weight") {
  std::vector<int> k{1, 1};
  CHECK(k_weight(std::span<const int>(k), 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  std::vector<int> k2{8, 27};
  CHECK(k_weight(std::span<const int>(k2), 3.0) == doctest::Approx(5.0).epsilon(1e-13));
  std::vector<int> k3{0, 0};
  CHECK(k_weight(std::span<const int>(k3), 1.7) == 0.0);
}

TEST_CASE("gevrey_norm on simple and random tables") {
  FourierSeries c3 = FourierSeries::constant(2, 4, Complex(3.0, 0.0));
  CHECK(gevrey_norm(c3, 2.0, 0.5) == doctest::Approx(3.0).epsilon(1e-15));

  FourierSeries mode(2, 4);
  mode.set_coeff(make_mode({1, 0}), Complex(1.0, 0.0));
  CHECK(gevrey_norm(mode, 2.0, 0.5) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));

  // direct summation oracle over a random coefficient table
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_int_distribution<int> ki(-4, 4);
  FourierSeries f(2, 4);
  double expected = 0.0;
  const double beta = 2.0, radius = 0.3;
  for (int i = 0; i < 10; ++i) {
    Mode k = make_mode({ki(rng), ki(rng)});
    Complex c(dist(rng), dist(rng));
    f.set_coeff(k, c);
  }
  f.for_each([&](const Mode& k, Complex c) {
    expected += std::exp(beta * radius *
                         (std::sqrt(std::abs(static_cast<double>(k[0]))) +
                          std::sqrt(std::abs(static_cast<double>(k[1]))))) *
                std::abs(c);
  });
  CHECK(gevrey_norm(f, beta, radius) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("multiply: identity, exponent addition, convolution oracle") {
  FourierSeries one = FourierSeries::constant(2, 4, Complex(1.0, 0.0));
  FourierSeries g = random_series(2, 4, 2.0, 0.3, 1.0, 11);
  FourierSeries prod = multiply(one, g);
  CHECK(series_distance(prod, g, 2.0, 0.3) < 1e-13);

  FourierSeries e1(2, 4), e2(2, 4);
  e1.set_coeff(make_mode({1, 0}), Complex(1.0, 0.0));
  e2.set_coeff(make_mode({2, 1}), Complex(1.0, 0.0));
  FourierSeries p12 = multiply(e1, e2);
  CHECK(std::abs(p12.coeff(make_mode({3, 1})) - Complex(1.0, 0.0)) < 1e-13);
  CHECK(p12.nonzero_count() == 1);

  // brute-force double-sum convolution at K = 4
  FourierSeries a = random_series(2, 4, 2.0, 0.3, 1.0, 21);
  FourierSeries b = random_series(2, 4, 2.0, 0.3, 1.0, 22);
  FourierSeries viagrid = multiply_exact(a, b);
  FourierSeries direct(2, 8);
  a.for_each([&](const Mode& ka, Complex ca) {
    b.for_each([&](const Mode& kb, Complex cb) {
      Mode k{};
      for (int i = 0; i < 2; ++i) k[i] = ka[i] + kb[i];
      direct.add_coeff(k, ca * cb);
    });
  });
  CHECK(series_distance(viagrid, direct, 2.0, 0.3) < 1e-12);
}

TEST_CASE("shift: identity, phase factor, isometry") {
  FourierSeries f = random_series(2, 6, 2.0, 0.3, 1.0, 31);
  std::vector<double> zero{0.0, 0.0};
  CHECK(series_distance(shift(f, zero), f, 2.0, 0.3) == 0.0);

  FourierSeries e(2, 3);
  e.set_coeff(make_mode({2, -1}), Complex(1.0, 0.0));
  std::vector<double> t{0.3, 0.7};
  Complex expected = std::polar(1.0, 2 * 0.3 - 1 * 0.7);
  CHECK(std::abs(shift(e, t).coeff(make_mode({2, -1})) - expected) < 1e-15);

  for (int trial = 0; trial < 5; ++trial) {
    FourierSeries r = random_series(2, 6, 2.0, 0.3, 2.0, 100 + trial);
    std::vector<double> tv{0.1 * trial, 1.3 - 0.2 * trial};
    CHECK(rel_diff(gevrey_norm(shift(r, tv), 2.0, 0.4), gevrey_norm(r, 2.0, 0.4)) < 1e-14);
  }
}

TEST_CASE("directional_derivative: trivial modes and finite differences") {
  FourierSeries c = FourierSeries::constant(2, 3, Complex(5.0, 0.0));
  std::vector<double> alpha{1.0, kGolden};
  CHECK(l1_norm(directional_derivative(c, alpha)) == 0.0);

  FourierSeries e(2, 3);
  e.set_coeff(make_mode({1, 2}), Complex(1.0, 0.0));
  Complex got = directional_derivative(e, alpha).coeff(make_mode({1, 2}));
  Complex expect = Complex(0.0, 1.0 * 1.0 + 2.0 * kGolden);
  CHECK(std::abs(got - expect) < 1e-15);

  CHECK(std::abs(average(directional_derivative(random_series(2, 6, 2.0, 0.3, 1.0, 41), alpha))) ==
        0.0);

  // centered finite difference of grid samples along alpha
  FourierSeries f = random_series(2, 6, 2.0, 0.4, 1.0, 42);
  GridSpec grid = GridSpec::for_cutoff(2, 6);
  const double h = 1e-5;
  std::vector<double> ph{h * alpha[0], h * alpha[1]};
  std::vector<double> mh{-h * alpha[0], -h * alpha[1]};
  std::vector<double> up = eval_grid(shift(f, ph), grid);
  std::vector<double> dn = eval_grid(shift(f, mh), grid);
  std::vector<double> der = eval_grid(directional_derivative(f, alpha), grid);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < der.size(); ++i) {
    worst = std::max(worst, std::abs((up[i] - dn[i]) / (2.0 * h) - der[i]));
    scale = std::max(scale, std::abs(der[i]));
  }
  CHECK(worst / scale < 1e-8);
}

TEST_CASE("average: constant and quadrature oracle") {
  FourierSeries c = FourierSeries::constant(2, 3, Complex(2.5, 0.0));
  CHECK(std::abs(average(c) - Complex(2.5, 0.0)) < 1e-16);

  FourierSeries f = random_series(2, 5, 2.0, 0.3, 1.0, 51);
  f.add_coeff(Mode{}, Complex(0.37, 0.0));
  GridSpec grid = GridSpec::for_cutoff(2, 5);
  std::vector<double> vals = eval_grid(f, grid);
  double quad = 0.0;
  for (double v : vals) quad += v;
  quad /= static_cast<double>(vals.size());
  CHECK(std::abs(average(f).real() - quad) < 1e-12);
}

TEST_CASE("eval_grid / from_grid are inverse on band-limited data") {
  GridSpec grid = GridSpec::for_cutoff(2, 8);

  FourierSeries c = FourierSeries::constant(2, 8, Complex(1.25, 0.0));
  for (double v : eval_grid(c, grid)) CHECK(v == doctest::Approx(1.25).epsilon(1e-15));

  FourierSeries cosx(2, 8);
  cosx.set_coeff(make_mode({1, 0}), Complex(1.0, 0.0));
  cosx.set_coeff(make_mode({-1, 0}), Complex(1.0, 0.0));
  std::vector<double> vals = eval_grid(cosx, grid);
  CHECK(vals[0] == doctest::Approx(2.0).epsilon(1e-14));  // 2 cos(0)

  FourierSeries back = from_grid(vals, grid, 8);
  CHECK(std::abs(back.coeff(make_mode({1, 0})) - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(back.coeff(make_mode({-1, 0})) - Complex(1.0, 0.0)) < 1e-14);

  FourierSeries f = random_series(2, 8, 2.0, 0.3, 1.0, 61);
  FourierSeries round = from_grid(eval_grid(f, grid), grid, 8);
  CHECK(series_distance(round, f, 2.0, 0.3) < 1e-13);
}

TEST_CASE("reciprocal: constants, pointwise oracle, near-singular flag") {
  GridSpec small = GridSpec::for_cutoff(2, 4);
  FourierSeries two = FourierSeries::constant(2, 4, Complex(2.0, 0.0));
  FourierSeries half = reciprocal(two, small, 1e-8);
  CHECK(std::abs(average(half) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(l1_norm(half) == doctest::Approx(0.5).epsilon(1e-14));

  FourierSeries f(2, 32);
  f.set_coeff(Mode{}, Complex(2.0, 0.0));
  f.set_coeff(make_mode({1, 0}), Complex(0.5, 0.0));
  f.set_coeff(make_mode({-1, 0}), Complex(0.5, 0.0));
  GridSpec grid = GridSpec::for_cutoff(2, 32);
  FourierSeries g = reciprocal(f, grid, 1e-8);
  FourierSeries prod = multiply(f, g, grid);
  prod.add_coeff(Mode{}, Complex(-1.0, 0.0));
  CHECK(gevrey_norm(prod, 2.0, 0.4) < 1e-10);

  FourierSeries sing(2, 8);
  sing.set_coeff(make_mode({1, 0}), Complex(1.0, 0.0));  // 2cos hits zero
  sing.set_coeff(make_mode({-1, 0}), Complex(1.0, 0.0));
  CHECK_THROWS_AS(reciprocal(sing, GridSpec::for_cutoff(2, 8), 1e-8), Error);
}

TEST_CASE("Banach algebra inequality on random pairs") {
  for (int trial = 0; trial < 50; ++trial) {
    FourierSeries a = random_series(2, 5, 2.0, 0.25, 1.5, 200 + trial);
    FourierSeries b = random_series(2, 5, 2.0, 0.25, 0.8, 300 + trial);
    FourierSeries p = multiply_exact(a, b);
    for (double r : {0.1, 0.25, 0.4}) {
      const double lhs = gevrey_norm(p, 2.0, r);
      const double rhs = gevrey_norm(a, 2.0, r) * gevrey_norm(b, 2.0, r);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("interpolation inequality and the exact weight identity") {
  for (int trial = 0; trial < 20; ++trial) {
    FourierSeries f = random_series(2, 6, 2.0, 0.3, 1.0, 400 + trial);
    const double r1 = 0.2 + 0.01 * trial, r2 = 0.5;
    // geometric mean: inequality via Cauchy-Schwarz plus monotonicity
    const double rg = std::sqrt(r1 * r2);
    CHECK(gevrey_norm(f, 2.0, rg) * gevrey_norm(f, 2.0, rg) <=
          gevrey_norm(f, 2.0, r1) * gevrey_norm(f, 2.0, r2) * (1.0 + 1e-12));
    // arithmetic mean: the weight identity is exact mode by mode
    const double ra = 0.5 * (r1 + r2);
    f.for_each([&](const Mode& k, Complex) {
      const double w = k_weight(k, 2, 2.0);
      const double lhs = std::exp(2.0 * 2.0 * ra * w);
      const double rhs = std::exp(2.0 * r1 * w) * std::exp(2.0 * r2 * w);
      CHECK(rel_diff(lhs, rhs) < 1e-12);
    });
  }
}

TEST_CASE("norm monotonicity in the radius") {
  FourierSeries f = random_series(2, 6, 2.0, 0.3, 1.0, 500);
  double prev = gevrey_norm(f, 2.0, 0.05);
  for (double r : {0.1, 0.2, 0.3, 0.4}) {
    const double cur = gevrey_norm(f, 2.0, r);
    CHECK(prev <= cur * (1.0 + 1e-15));
    prev = cur;
  }
}

namespace {

FourierSeries axis_derivative(const FourierSeries& f, int axis, int order) {
  FourierSeries out(f.dim(), f.cutoff());
  f.for_each([&](const Mode& k, Complex c) {
    Complex m(1.0, 0.0);
    for (int r = 0; r < order; ++r) m *= Complex(0.0, static_cast<double>(k[axis]));
    out.set_coeff(k, m * c);
  });
  return out;
}

}  // namespace

TEST_CASE("discrete Cauchy-type derivative estimate") {
  const double beta = 2.0, radius = 0.4;
  FourierSeries f = random_series(2, 8, beta, radius, 1.0, 600);
  const double base = gevrey_norm(f, beta, radius);
  for (double lambda : {0.1, 0.2}) {
    for (int r = 1; r <= 3; ++r) {
      double sum = 0.0;
      for (int g0 = 0; g0 <= r; ++g0) {
        const int g1 = r - g0;
        FourierSeries d = axis_derivative(axis_derivative(f, 0, g0), 1, g1);
        sum += gevrey_norm(d, beta, radius - lambda);
      }
      double fact = 1.0;
      for (int i = 2; i <= r; ++i) fact *= i;
      const double bound = std::pow(fact / std::pow(lambda, r), beta) * base;
      CHECK(sum <= bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("coefficient drop keeps the norm within the stated budget") {
  FourierSeries f = random_series(2, 6, 2.0, 0.3, 1.0, 700);
  const double before = gevrey_norm(f, 2.0, 0.3);
  FourierSeries g = f;
  TailStats tail = g.drop_small(1e-12);
  const double after = gevrey_norm(g, 2.0, 0.3);
  double wmax = 0.0;
  f.for_each([&](const Mode& k, Complex) {
    wmax = std::max(wmax, std::exp(2.0 * 0.3 * k_weight(k, 2, 2.0)));
  });
  CHECK(std::abs(before - after) <=
        static_cast<double>(tail.dropped_count) * tail.max_dropped * wmax + 1e-300);
}
