#ifndef QPKAM_TESTS_SUPPORT_HPP
#define QPKAM_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <vector>

#include "qpkam/certifier.hpp"
#include "qpkam/config.hpp"

namespace qpkam::testing {

inline const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

inline Frequency desk_frequency(int kmax = 64) {
  Frequency freq;
  freq.alpha = {1.0, kGolden};
  freq.omega = 1.0;
  freq.tau = 2.0;
  freq.kmax = kmax;
  freq.estimate();
  return freq;
}

inline GevreyParams desk_gevrey() { return GevreyParams{2.0, 0.4, 1.0}; }

inline Interaction twist_interaction(double a = 1.0) {
  Interaction inter;
  inter.range = 1;
  inter.twist = a;
  return inter;
}

// epsilon * cos(e1 . zeta) acting on a single site.
inline Interaction onsite_cos(double epsilon, std::vector<int> k = {1, 0}) {
  Interaction inter;
  inter.range = 0;
  InteractionTerm term;
  term.coeff = epsilon;
  Factor fac;
  fac.kind = Factor::Kind::Site;
  fac.site = 0;
  int cut = 0;
  for (int ki : k) cut = std::max(cut, std::abs(ki));
  fac.series = FourierSeries(static_cast<int>(k.size()), cut);
  Mode kp = make_mode(std::span<const int>(k));
  Mode km{};
  for (std::size_t i = 0; i < k.size(); ++i) km[i] = -kp[i];
  fac.series.set_coeff(kp, Complex(0.5, 0.0));
  fac.series.set_coeff(km, Complex(0.5, 0.0));
  term.factors.push_back(fac);
  inter.terms.push_back(term);
  return inter;
}

// Classic desk model: twist a=1 plus H_0 = epsilon cos(e1 . zeta).
inline Model desk_model(double epsilon = 0.01, int cutoff = 32) {
  std::vector<Interaction> inters{twist_interaction(1.0), onsite_cos(epsilon)};
  return Model(std::move(inters), desk_frequency(2 * cutoff), desk_gevrey(), cutoff);
}

// Rank-1 range-2 coupling: c * cos(e1.zeta_0) * cos(e2.zeta_2).
inline Interaction long_range_pair(double c) {
  Interaction inter;
  inter.range = 2;
  InteractionTerm term;
  term.coeff = c;
  Factor f0;
  f0.kind = Factor::Kind::Site;
  f0.site = 0;
  f0.series = FourierSeries(2, 1);
  f0.series.set_coeff(make_mode({1, 0}), Complex(0.5, 0.0));
  f0.series.set_coeff(make_mode({-1, 0}), Complex(0.5, 0.0));
  Factor f2 = f0;
  f2.site = 2;
  f2.series = FourierSeries(2, 1);
  f2.series.set_coeff(make_mode({0, 1}), Complex(0.5, 0.0));
  f2.series.set_coeff(make_mode({0, -1}), Complex(0.5, 0.0));
  term.factors = {f0, f2};
  inter.terms.push_back(term);
  return inter;
}

inline Model desk_model_long_range(double epsilon = 0.01, double c2 = 2e-4, int cutoff = 32) {
  std::vector<Interaction> inters{twist_interaction(1.0), onsite_cos(epsilon),
                                  long_range_pair(c2)};
  return Model(std::move(inters), desk_frequency(2 * cutoff), desk_gevrey(), cutoff);
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double series_distance(const FourierSeries& a, const FourierSeries& b, double beta,
                              double radius) {
  FourierSeries d = a;
  d -= b;
  return gevrey_norm(d, beta, radius);
}

}  // namespace qpkam::testing

#endif
