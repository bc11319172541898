#ifndef QPKAM_FOURIER_SERIES_HPP
#define QPKAM_FOURIER_SERIES_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qpkam/errors.hpp"

namespace qpkam {

using Complex = std::complex<double>;

// Torus dimension is small (chains in quasi-periodic media use d <= 4);
// joint-variable series for pair interactions need up to 2*d.
inline constexpr int kMaxDim = 8;

// A lattice mode k in Z^d, padded with zeros beyond dim.
using Mode = std::array<int, kMaxDim>;

Mode make_mode(std::initializer_list<int> components);
Mode make_mode(std::span<const int> components);

// Anisotropic mode weight |k|_beta = sum_i |k_i|^(1/beta), beta >= 1.
double k_weight(const Mode& k, int dim, double beta);
double k_weight(std::span<const int> k, double beta);

// Gevrey-(beta, R) bookkeeping. `margin` is the composition slack the
// model budget keeps in reserve for Newton corrections.
struct GevreyParams {
  double beta = 1.0;
  double radius = 1.0;
  double margin = 0.0;

  void validate() const;
};

// Mass discarded by truncating operations; surfaced to the certifier so
// reported constants always come with their truncation error.
struct TailStats {
  double dropped_mass = 0.0;  // sum of |f_k| over discarded modes
  double max_dropped = 0.0;
  std::int64_t dropped_count = 0;

  TailStats& operator+=(const TailStats& other) {
    dropped_mass += other.dropped_mass;
    max_dropped = max_dropped > other.max_dropped ? max_dropped : other.max_dropped;
    dropped_count += other.dropped_count;
    return *this;
  }
};

// Truncated Fourier series on T^dim holding all modes with ||k||_inf <= cutoff.
// Storage is a dense cube; real-valued functions keep Hermitian symmetry
// f_{-k} = conj(f_k).
class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(int dim, int cutoff);

  static FourierSeries constant(int dim, int cutoff, Complex value);

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  std::int64_t table_size() const { return static_cast<std::int64_t>(coeffs_.size()); }

  Complex coeff(const Mode& k) const;  // zero outside the cutoff cube
  void set_coeff(const Mode& k, Complex value);
  void add_coeff(const Mode& k, Complex value);

  Complex& at(const Mode& k);  // throws outside the cube

  bool in_range(const Mode& k) const;

  // Visits every stored mode with |coeff| > 0 in lexicographic order
  // (deterministic summation and serialization order).
  void for_each(const std::function<void(const Mode&, Complex)>& fn) const;

  std::size_t nonzero_count() const;
  double max_abs_coeff() const;

  // Zeroes coefficients below threshold * max|f_k|; returns dropped stats.
  TailStats drop_small(double relative_threshold);

  // Largest |f_{-k} - conj(f_k)| over the table.
  double hermitian_defect() const;
  // Averages f_k and conj(f_{-k}so that the defect becomes exactly zero.
  void symmetrize();

  FourierSeries& operator+=(const FourierSeries& other);
  FourierSeries& operator-=(const FourierSeries& other);
  FourierSeries& operator*=(Complex scalar);

  friend FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
  friend FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
  friend FourierSeries operator*(FourierSeries a, Complex s) { return a *= s; }
  friend FourierSeries operator*(Complex s, FourierSeries a) { return a *= s; }

  // Returns a copy with the (possibly larger) cutoff; shrinking reports tail.
  FourierSeries with_cutoff(int cutoff, TailStats* tail = nullptr) const;

  std::span<const Complex> raw() const { return coeffs_; }
  std::span<Complex> raw() { return coeffs_; }

  std::int64_t index_of(const Mode& k) const;
  Mode mode_at(std::int64_t index) const;

 private:
  int dim_ = 0;
  int cutoff_ = 0;
  std::vector<Complex> coeffs_;  // (2*cutoff+1)^dim, lexicographic in k + cutoff
};

// F_{beta,R} norm: sum_k e^{beta R |k|_beta} |f_k|. Exact on truncated series.
double gevrey_norm(const FourierSeries& f, double beta, double radius);
double gevrey_norm(const FourierSeries& f, const GevreyParams& g);

// Unweighted l1 mass, i.e. the norm at R = 0.
double l1_norm(const FourierSeries& f);

// f(. + t): coefficients f_k e^{i k.t}. Norm isometry for real t.
FourierSeries shift(const FourierSeries& f, std::span<const double> t);

// alpha-directional derivative: coefficients i (k.alpha) f_k; zero average.
FourierSeries directional_derivative(const FourierSeries& f, std::span<const double> alpha);

// The k = 0 coefficient.
Complex average(const FourierSeries& f);

// Evaluates the trigonometric polynomial at one point (direct mode sum).
Complex evaluate_at(const FourierSeries& f, std::span<const double> point);

void check_same_dim(const FourierSeries& a, const FourierSeries& b);

}  // namespace qpkam

#endif
