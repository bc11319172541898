#ifndef QPKAM_COHOMOLOGY_HPP
#define QPKAM_COHOMOLOGY_HPP

#include "qpkam/fourier_series.hpp"
#include "qpkam/frequency.hpp"

namespace qpkam {

// Difference operator [S_n eta](sigma) = eta(sigma + n omega alpha) - eta(sigma).
// The result has exactly zero average.
FourierSeries apply_S(const FourierSeries& eta, int n, const Frequency& freq);

// Unique zero-average phi with S_n phi = eta, solved mode-by-mode:
// phi_k = eta_k / (e^{i n k.omega alpha} - 1). Requires <eta> = 0 and n != 0.
// `divisor_floor` flags numerically resonant retained modes; pass 0 to use
// the default 1e-3 * nu * cutoff^-tau derived from the scanned constants.
FourierSeries solve_cohomology(const FourierSeries& eta, int n, const Frequency& freq,
                               double divisor_floor = 0.0);

// L_n^{+-} = S_{+-1}^{-1} S_n via the divisor-free telescoped sums; maps all
// of G into the zero-average subspace with norm at most |n|.
FourierSeries apply_L(const FourierSeries& eta, int n, int sign, const Frequency& freq);

// R_n^{+-} = S_n S_{+-1}^{-1}; defined on zero-average input only.
FourierSeries apply_R(const FourierSeries& eta, int n, int sign, const Frequency& freq);

double default_divisor_floor(const Frequency& freq, int cutoff);

}  // namespace qpkam

#endif
