#ifndef QPKAM_GRID_HPP
#define QPKAM_GRID_HPP

#include <vector>

#include "qpkam/fourier_series.hpp"

namespace qpkam {

// Uniform tensor grid on T^dim with `points` nodes per axis. The padding
// factor is recorded so callers can assert the anti-aliasing invariant
// points >= padding * (2*cutoff + 1) for quadratic products.
struct GridSpec {
  int dim = 0;
  int points = 0;
  int padding = 2;

  // Smallest FFT-friendly grid for the given cutoff.
  static GridSpec for_cutoff(int dim, int cutoff, int padding = 2);

  std::int64_t total_points() const;
  bool unaliased_for(int cutoff) const { return points >= padding * (2 * cutoff + 1); }
  // Products of cutoffs ka, kb truncated to kout keep the retained band
  // exact iff no alias source ka+kb can wrap onto it.
  bool product_exact(int ka, int kb, int kout) const { return points >= ka + kb + kout + 1; }
};

// Smallest integer >= n whose factors are all in {2, 3, 5}.
int next_fast_size(int n);

// Pointwise values of a real (Hermitian) series on the grid, row-major over
// axes. Throws SymmetryViolation when the table is not Hermitian.
std::vector<double> eval_grid(const FourierSeries& f, const GridSpec& grid);

// Complex variant; no symmetry requirement.
std::vector<Complex> eval_grid_complex(const FourierSeries& f, const GridSpec& grid);

// Inverse transform truncated to ||k||_inf <= cutoff; discarded grid modes
// are accumulated into `tail`.
FourierSeries from_grid(const std::vector<double>& values, const GridSpec& grid, int cutoff,
                        TailStats* tail = nullptr);
FourierSeries from_grid_complex(const std::vector<Complex>& values, const GridSpec& grid,
                                int cutoff, TailStats* tail = nullptr);

// Coefficient-space product via the padded grid. Output cutoff is
// max(cutoff_f, cutoff_g); the retained band is exact whenever the grid
// satisfies the product_exact condition (enforced).
FourierSeries multiply(const FourierSeries& f, const FourierSeries& g, const GridSpec& grid,
                       TailStats* tail = nullptr);

// Convenience: product on the default padded grid for the operand cutoffs.
FourierSeries multiply(const FourierSeries& f, const FourierSeries& g,
                       TailStats* tail = nullptr);

// Product kept at the full cutoff cutoff_f + cutoff_g (no truncation).
FourierSeries multiply_exact(const FourierSeries& f, const FourierSeries& g,
                             TailStats* tail = nullptr);

// Pointwise inverse 1/f re-expanded at the cutoff of f. Requires
// min_grid |f| >= floor > 0, else NearSingular.
FourierSeries reciprocal(const FourierSeries& f, const GridSpec& grid, double floor,
                         TailStats* tail = nullptr);

double grid_min_abs(const FourierSeries& f, const GridSpec& grid);

}  // namespace qpkam

#endif
