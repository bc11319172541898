#include "qpkam/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace qpkam {

namespace {

// FFTW's planner is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void run_dft(std::vector<Complex>& data, const GridSpec& grid, int sign) {
  std::vector<int> n(static_cast<std::size_t>(grid.dim), grid.points);
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(grid.dim, n.data(), reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()), sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error(ErrorCode::InvalidArgument, "fftw plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

std::int64_t wrapped_index(const Mode& k, const GridSpec& grid) {
  std::int64_t idx = 0;
  for (int i = 0; i < grid.dim; ++i) {
    const int m = ((k[i] % grid.points) + grid.points) % grid.points;
    idx = idx * grid.points + m;
  }
  return idx;
}

void check_grid(const FourierSeries& f, const GridSpec& grid) {
  if (grid.dim != f.dim()) throw Error(ErrorCode::DimensionMismatch, "grid dim mismatch");
  if (grid.points < 1) throw Error(ErrorCode::InvalidArgument, "grid needs points >= 1");
}

}  // namespace

int next_fast_size(int n) {
  auto smooth = [](int m) {
    for (int p : {2, 3, 5}) {
      while (m % p == 0) m /= p;
    }
    return m == 1;
  };
  while (!smooth(n)) ++n;
  return n;
}

GridSpec GridSpec::for_cutoff(int dim, int cutoff, int padding) {
  if (padding < 2) throw Error(ErrorCode::InvalidArgument, "grid padding must be >= 2");
  GridSpec g;
  g.dim = dim;
  g.padding = padding;
  g.points = next_fast_size(padding * (2 * cutoff + 1));
  return g;
}

std::int64_t GridSpec::total_points() const {
  std::int64_t n = 1;
  for (int i = 0; i < dim; ++i) {
    n *= points;
    if (n > (std::int64_t{1} << 28)) {
      throw Error(ErrorCode::InvalidArgument, "grid too large");
    }
  }
  return n;
}

std::vector<Complex> eval_grid_complex(const FourierSeries& f, const GridSpec& grid) {
  check_grid(f, grid);
  std::vector<Complex> data(static_cast<std::size_t>(grid.total_points()), Complex(0.0, 0.0));
  // += so that sampling on an intentionally coarse grid aliases exactly.
  f.for_each([&](const Mode& k, Complex c) { data[wrapped_index(k, grid)] += c; });
  run_dft(data, grid, FFTW_BACKWARD);
  return data;
}

std::vector<double> eval_grid(const FourierSeries& f, const GridSpec& grid) {
  const double defect = f.hermitian_defect();
  const double scale = std::max(1.0, f.max_abs_coeff());
  if (defect > 1e-10 * scale) {
    throw Error(ErrorCode::SymmetryViolation, "series is not Hermitian-symmetric");
  }
  std::vector<Complex> data = eval_grid_complex(f, grid);
  std::vector<double> values(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) values[i] = data[i].real();
  return values;
}

FourierSeries from_grid_complex(const std::vector<Complex>& values, const GridSpec& grid,
                                int cutoff, TailStats* tail) {
  if (values.size() != static_cast<std::size_t>(grid.total_points())) {
    throw Error(ErrorCode::DimensionMismatch, "grid value count mismatch");
  }
  std::vector<Complex> data = values;
  run_dft(data, grid, FFTW_FORWARD);
  const double inv_n = 1.0 / static_cast<double>(grid.total_points());
  for (Complex& c : data) c *= inv_n;

  FourierSeries out(grid.dim, cutoff);
  const int half = grid.points / 2;
  // Walk every grid mode; indices above points/2 represent negative k.
  const std::int64_t total = grid.total_points();
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rest = flat;
    bool in_band = true;
    Mode k{};
    for (int i = grid.dim - 1; i >= 0; --i) {
      int mi = static_cast<int>(rest % grid.points);
      rest /= grid.points;
      int ki = mi <= half ? mi : mi - grid.points;
      k[i] = ki;
      if (std::abs(ki) > cutoff) in_band = false;
    }
    const Complex c = data[flat];
    if (in_band) {
      out.set_coeff(k, c);
    } else if (tail != nullptr) {
      const double a = std::abs(c);
      tail->dropped_mass += a;
      tail->max_dropped = std::max(tail->max_dropped, a);
      if (a > 0.0) ++tail->dropped_count;
    }
  }
  return out;
}

FourierSeries from_grid(const std::vector<double>& values, const GridSpec& grid, int cutoff,
                        TailStats* tail) {
  std::vector<Complex> complex_values(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) complex_values[i] = Complex(values[i], 0.0);
  FourierSeries out = from_grid_complex(complex_values, grid, cutoff, tail);
  out.symmetrize();  // real input: defect is pure roundoff
  return out;
}

namespace {

// DFT roundoff scatters ~1e-16 * max noise across the table; sweep it out so
// sparse inputs stay sparse.
constexpr double kProductNoiseFloor = 1e-15;

}  // namespace

FourierSeries multiply(const FourierSeries& f, const FourierSeries& g, const GridSpec& grid,
                       TailStats* tail) {
  check_same_dim(f, g);
  check_grid(f, grid);
  const int out_cutoff = std::max(f.cutoff(), g.cutoff());
  if (!grid.product_exact(f.cutoff(), g.cutoff(), out_cutoff)) {
    throw Error(ErrorCode::AliasingBudgetExceeded,
                "grid too coarse for an exact product on the retained band");
  }
  std::vector<Complex> fv = eval_grid_complex(f, grid);
  std::vector<Complex> gv = eval_grid_complex(g, grid);
  for (std::size_t i = 0; i < fv.size(); ++i) fv[i] *= gv[i];
  FourierSeries out = from_grid_complex(fv, grid, out_cutoff, tail);
  TailStats dropped = out.drop_small(kProductNoiseFloor);
  if (tail != nullptr) *tail += dropped;
  return out;
}

FourierSeries multiply(const FourierSeries& f, const FourierSeries& g, TailStats* tail) {
  check_same_dim(f, g);
  const int out_cutoff = std::max(f.cutoff(), g.cutoff());
  return multiply(f, g, GridSpec::for_cutoff(f.dim(), out_cutoff), tail);
}

FourierSeries multiply_exact(const FourierSeries& f, const FourierSeries& g, TailStats* tail) {
  check_same_dim(f, g);
  const int out_cutoff = f.cutoff() + g.cutoff();
  GridSpec grid = GridSpec::for_cutoff(f.dim(), out_cutoff);
  std::vector<Complex> fv = eval_grid_complex(f, grid);
  std::vector<Complex> gv = eval_grid_complex(g, grid);
  for (std::size_t i = 0; i < fv.size(); ++i) fv[i] *= gv[i];
  FourierSeries out = from_grid_complex(fv, grid, out_cutoff, tail);
  TailStats dropped = out.drop_small(kProductNoiseFloor);
  if (tail != nullptr) *tail += dropped;
  return out;
}

FourierSeries reciprocal(const FourierSeries& f, const GridSpec& grid, double floor,
                         TailStats* tail) {
  if (floor <= 0.0) throw Error(ErrorCode::InvalidArgument, "reciprocal floor must be > 0");
  std::vector<double> values = eval_grid(f, grid);
  double min_abs = std::abs(values[0]);
  for (double v : values) min_abs = std::min(min_abs, std::abs(v));
  if (min_abs < floor) {
    throw Error(ErrorCode::NearSingular,
                "pointwise values reach " + std::to_string(min_abs) + " below floor " +
                    std::to_string(floor));
  }
  for (double& v : values) v = 1.0 / v;
  FourierSeries out = from_grid(values, grid, f.cutoff(), tail);
  TailStats dropped = out.drop_small(kProductNoiseFloor);
  if (tail != nullptr) *tail += dropped;
  return out;
}

double grid_min_abs(const FourierSeries& f, const GridSpec& grid) {
  std::vector<Complex> values = eval_grid_complex(f, grid);
  double min_abs = std::abs(values[0]);
  for (const Complex& v : values) min_abs = std::min(min_abs, std::abs(v));
  return min_abs;
}

}  // namespace qpkam
