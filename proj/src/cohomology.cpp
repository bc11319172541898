#include "qpkam/cohomology.hpp"

#include <cmath>
#include <sstream>

namespace qpkam {

namespace {

void check_dim(const FourierSeries& eta, const Frequency& freq) {
  if (eta.dim() != freq.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "series and frequency dims differ");
  }
}

void require_zero_average(const FourierSeries& eta, const char* op) {
  const double mean = std::abs(average(eta));
  const double scale = std::max(l1_norm(eta), 1e-300);
  if (mean > 1e-10 * scale) {
    throw Error(ErrorCode::NonzeroAverage, std::string(op) + " requires a zero-average input");
  }
}

std::vector<double> step_vector(const Frequency& freq, int n) {
  std::vector<double> t(freq.alpha.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = n * freq.omega * freq.alpha[i];
  return t;
}

// sum_{j in [j0, j1]} eta(. + j omega alpha), inclusive.
FourierSeries shifted_sum(const FourierSeries& eta, int j0, int j1, const Frequency& freq) {
  FourierSeries acc(eta.dim(), eta.cutoff());
  for (int j = j0; j <= j1; ++j) {
    acc += shift(eta, step_vector(freq, j));
  }
  return acc;
}

}  // namespace

double default_divisor_floor(const Frequency& freq, int cutoff) {
  if (freq.nu <= 0.0 || cutoff < 1) return 0.0;
  return 1e-3 * freq.nu * std::pow(static_cast<double>(cutoff), -freq.tau);
}

FourierSeries apply_S(const FourierSeries& eta, int n, const Frequency& freq) {
  check_dim(eta, freq);
  FourierSeries out = shift(eta, step_vector(freq, n));
  out -= eta;
  out.set_coeff(Mode{}, Complex(0.0, 0.0));
  return out;
}

FourierSeries solve_cohomology(const FourierSeries& eta, int n, const Frequency& freq,
                               double divisor_floor) {
  check_dim(eta, freq);
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "S_0 is not invertible");
  require_zero_average(eta, "solve_cohomology");
  const double floor =
      divisor_floor > 0.0 ? divisor_floor : default_divisor_floor(freq, eta.cutoff());

  FourierSeries phi(eta.dim(), eta.cutoff());
  eta.for_each([&](const Mode& k, Complex c) {
    bool zero_mode = true;
    for (int i = 0; i < eta.dim(); ++i) zero_mode = zero_mode && k[i] == 0;
    if (zero_mode) return;
    const Complex divisor = std::polar(1.0, n * freq.phase(k)) - 1.0;
    const double mag = std::abs(divisor);
    if (mag < floor) {
      std::ostringstream msg;
      msg << "divisor " << mag << " below floor " << floor << " at k = (";
      for (int i = 0; i < eta.dim(); ++i) msg << (i ? "," : "") << k[i];
      msg << ")";
      throw Error(ErrorCode::ResonantMode, msg.str());
    }
    phi.set_coeff(k, c / divisor);
  });
  return phi;
}

FourierSeries apply_L(const FourierSeries& eta, int n, int sign, const Frequency& freq) {
  check_dim(eta, freq);
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +-1");
  if (n == 0) return FourierSeries(eta.dim(), eta.cutoff());

  // Zero-average telescoped solutions of S_sign phi = S_n eta.
  FourierSeries out(eta.dim(), eta.cutoff());
  if (sign == 1) {
    out = n > 0 ? shifted_sum(eta, 0, n - 1, freq)
                : shifted_sum(eta, n, -1, freq) * Complex(-1.0, 0.0);
  } else {
    out = n > 0 ? shifted_sum(eta, 1, n, freq) * Complex(-1.0, 0.0)
                : shifted_sum(eta, -(-n) + 1, 0, freq);
  }
  out.set_coeff(Mode{}, Complex(0.0, 0.0));  // the -n<eta> correction, exactly
  return out;
}

FourierSeries apply_R(const FourierSeries& eta, int n, int sign, const Frequency& freq) {
  check_dim(eta, freq);
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +-1");
  require_zero_average(eta, "apply_R");
  if (n == 0) return FourierSeries(eta.dim(), eta.cutoff());
  // On the zero-average subspace R_n coincides with L_n term by term.
  return apply_L(eta, n, sign, freq);
}

}  // namespace qpkam
