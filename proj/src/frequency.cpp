#include "qpkam/frequency.hpp"

#include <cmath>
#include <numbers>

namespace qpkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Enumerates 0 < ||k||_inf <= kmax with the first nonzero component positive
// (the scanned quantities are even in k), calling fn(k, |k|_1).
template <typename Fn>
void scan_half_lattice(int dim, int kmax, Fn&& fn) {
  Mode k{};
  const std::int64_t side = 2 * static_cast<std::int64_t>(kmax) + 1;
  std::int64_t total = 1;
  for (int i = 0; i < dim; ++i) total *= side;
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rest = flat;
    int l1 = 0;
    int first_nonzero = 0;
    for (int i = dim - 1; i >= 0; --i) {
      const int ki = static_cast<int>(rest % side) - kmax;
      rest /= side;
      k[i] = ki;
      l1 += std::abs(ki);
    }
    for (int i = 0; i < dim; ++i) {
      if (k[i] != 0) {
        first_nonzero = k[i];
        break;
      }
    }
    if (l1 == 0 || first_nonzero < 0) continue;
    fn(k, l1);
  }
}

}  // namespace

double Frequency::phase(const Mode& k) const {
  double ka = 0.0;
  for (int i = 0; i < dim(); ++i) ka += k[i] * alpha[i];
  return omega * ka;
}

void Frequency::estimate() {
  if (dim() < 1) throw Error(ErrorCode::ValidationError, "frequency needs alpha");
  if (kmax < 1) throw Error(ErrorCode::ValidationError, "frequency scan needs kmax >= 1");
  DioEstimate dio = estimate_dio_constants(alpha, omega, tau, kmax);
  nu = dio.nu;
  const double t0 = tau0 > 0.0 ? tau0 : tau;
  DioEstimate dio1 = estimate_dio1_constants(alpha, t0, kmax);
  nu0 = dio1.nu;
  if (nu0 <= 0.0) {
    throw Error(ErrorCode::DegenerateFrequency,
                "alpha is rationally dependent on the scanned lattice");
  }
}

DioEstimate estimate_dio_constants(std::span<const double> alpha, double omega, double tau,
                                   int kmax) {
  if (kmax < 1) throw Error(ErrorCode::InvalidArgument, "kmax must be >= 1");
  const int dim = static_cast<int>(alpha.size());
  DioEstimate best;
  best.nu = std::numeric_limits<double>::infinity();
  scan_half_lattice(dim, kmax, [&](const Mode& k, int l1) {
    double ka = 0.0;
    for (int i = 0; i < dim; ++i) ka += k[i] * alpha[i];
    const double x = omega * ka;
    const double divisor = std::abs(x - kTwoPi * std::round(x / kTwoPi));
    const double weighted = divisor * std::pow(static_cast<double>(l1), tau);
    if (weighted < best.nu) {
      best.nu = weighted;
      best.argmin = k;
      best.worst_divisor = divisor;
    }
  });
  // A scanned mode sitting exactly on 2 pi Z means omega alpha.k is resonant.
  const double degenerate_scale = 1e-15 * std::max(1.0, std::abs(omega)) * kmax;
  if (best.worst_divisor <= degenerate_scale) {
    throw Error(ErrorCode::DegenerateFrequency,
                "omega alpha.k hits 2 pi Z on the scanned lattice");
  }
  return best;
}

DioEstimate estimate_dio1_constants(std::span<const double> alpha, double tau0, int kmax) {
  if (kmax < 1) throw Error(ErrorCode::InvalidArgument, "kmax must be >= 1");
  const int dim = static_cast<int>(alpha.size());
  DioEstimate best;
  best.nu = std::numeric_limits<double>::infinity();
  scan_half_lattice(dim, kmax, [&](const Mode& k, int l1) {
    double ka = 0.0;
    for (int i = 0; i < dim; ++i) ka += k[i] * alpha[i];
    const double weighted = std::abs(ka) * std::pow(static_cast<double>(l1), tau0);
    if (weighted < best.nu) {
      best.nu = weighted;
      best.argmin = k;
      best.worst_divisor = std::abs(ka);
    }
  });
  return best;
}

}  // namespace qpkam
