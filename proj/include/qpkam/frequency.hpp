#ifndef QPKAM_FREQUENCY_HPP
#define QPKAM_FREQUENCY_HPP

#include <vector>

#include "qpkam/fourier_series.hpp"

namespace qpkam {

struct DioEstimate {
  double nu = 0.0;   // min over the scanned lattice of |omega alpha.k - 2 pi n| |k|_1^tau
  Mode argmin{};     // the minimizing k
  double worst_divisor = 0.0;  // |omega alpha.k - 2 pi n| at the argmin
};

// Quasi-periodicity data: frequency vector alpha on [0,1]^d, rotation
// number omega, and the lattice-scanned Diophantine constants.
struct Frequency {
  std::vector<double> alpha;
  double omega = 0.0;
  double tau = 0.0;
  double nu = 0.0;    // from estimate(); lower bound over the scanned lattice
  double tau0 = 0.0;  // Diophantine exponent of alpha itself
  double nu0 = 0.0;
  int kmax = 0;       // lattice scan cutoff

  int dim() const { return static_cast<int>(alpha.size()); }

  // omega * (alpha . k)
  double phase(const Mode& k) const;

  // Fills nu/nu0 by scanning ||k||_inf <= kmax. Throws DegenerateFrequency
  // when a scanned mode hits 2 pi Z to machine precision.
  void estimate();
};

// nu = min_{0 < ||k||_inf <= kmax, n} |omega alpha.k - 2 pi n| * |k|_1^tau.
DioEstimate estimate_dio_constants(std::span<const double> alpha, double omega, double tau,
                                   int kmax);

// Same scan for (dio1): |alpha.k| * |k|_1^tau0.
DioEstimate estimate_dio1_constants(std::span<const double> alpha, double tau0, int kmax);

}  // namespace qpkam

#endif
