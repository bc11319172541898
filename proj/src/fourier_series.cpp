#include "qpkam/fourier_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace qpkam {

Mode make_mode(std::initializer_list<int> components) {
  if (components.size() > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorCode::InvalidArgument, "mode has more than kMaxDim components");
  }
  Mode k{};
  std::copy(components.begin(), components.end(), k.begin());
  return k;
}

Mode make_mode(std::span<const int> components) {
  if (components.size() > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorCode::InvalidArgument, "mode has more than kMaxDim components");
  }
  Mode k{};
  std::copy(components.begin(), components.end(), k.begin());
  return k;
}

double k_weight(const Mode& k, int dim, double beta) {
  double w = 0.0;
  for (int i = 0; i < dim; ++i) {
    if (k[i] != 0) w += std::pow(std::abs(static_cast<double>(k[i])), 1.0 / beta);
  }
  return w;
}

double k_weight(std::span<const int> k, double beta) {
  if (beta < 1.0) throw Error(ErrorCode::InvalidArgument, "k_weight requires beta >= 1");
  double w = 0.0;
  for (int ki : k) {
    if (ki != 0) w += std::pow(std::abs(static_cast<double>(ki)), 1.0 / beta);
  }
  return w;
}

void GevreyParams::validate() const {
  if (beta < 1.0) throw Error(ErrorCode::ValidationError, "beta must be >= 1");
  if (radius <= 0.0) throw Error(ErrorCode::ValidationError, "radius must be > 0");
  if (margin <= 0.0) throw Error(ErrorCode::ValidationError, "margin must be > 0");
}

namespace {

std::int64_t cube_size(int dim, int cutoff) {
  std::int64_t side = 2 * static_cast<std::int64_t>(cutoff) + 1;
  std::int64_t n = 1;
  for (int i = 0; i < dim; ++i) {
    n *= side;
    if (n > (std::int64_t{1} << 26)) {
      throw Error(ErrorCode::InvalidArgument,
                  "coefficient table too large (reduce cutoff or dim)");
    }
  }
  return n;
}

}  // namespace

FourierSeries::FourierSeries(int dim, int cutoff) : dim_(dim), cutoff_(cutoff) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::InvalidArgument, "dim must be in [1, 8]");
  }
  if (cutoff < 0) throw Error(ErrorCode::InvalidArgument, "cutoff must be >= 0");
  coeffs_.assign(cube_size(dim, cutoff), Complex(0.0, 0.0));
}

FourierSeries FourierSeries::constant(int dim, int cutoff, Complex value) {
  FourierSeries f(dim, cutoff);
  f.coeffs_[f.index_of(Mode{})] = value;
  return f;
}

std::int64_t FourierSeries::index_of(const Mode& k) const {
  std::int64_t side = 2 * static_cast<std::int64_t>(cutoff_) + 1;
  std::int64_t idx = 0;
  for (int i = 0; i < dim_; ++i) {
    idx = idx * side + (k[i] + cutoff_);
  }
  return idx;
}

Mode FourierSeries::mode_at(std::int64_t index) const {
  std::int64_t side = 2 * static_cast<std::int64_t>(cutoff_) + 1;
  Mode k{};
  for (int i = dim_ - 1; i >= 0; --i) {
    k[i] = static_cast<int>(index % side) - cutoff_;
    index /= side;
  }
  return k;
}

bool FourierSeries::in_range(const Mode& k) const {
  for (int i = 0; i < dim_; ++i) {
    if (k[i] < -cutoff_ || k[i] > cutoff_) return false;
  }
  for (int i = dim_; i < kMaxDim; ++i) {
    if (k[i] != 0) return false;
  }
  return true;
}

Complex FourierSeries::coeff(const Mode& k) const {
  if (!in_range(k)) return Complex(0.0, 0.0);
  return coeffs_[index_of(k)];
}

void FourierSeries::set_coeff(const Mode& k, Complex value) { at(k) = value; }

void FourierSeries::add_coeff(const Mode& k, Complex value) { at(k) += value; }

Complex& FourierSeries::at(const Mode& k) {
  if (!in_range(k)) {
    throw Error(ErrorCode::InvalidArgument, "mode outside the cutoff cube");
  }
  return coeffs_[index_of(k)];
}

void FourierSeries::for_each(const std::function<void(const Mode&, Complex)>& fn) const {
  for (std::int64_t i = 0; i < table_size(); ++i) {
    if (coeffs_[i] != Complex(0.0, 0.0)) fn(mode_at(i), coeffs_[i]);
  }
}

std::size_t FourierSeries::nonzero_count() const {
  std::size_t n = 0;
  for (const Complex& c : coeffs_) {
    if (c != Complex(0.0, 0.0)) ++n;
  }
  return n;
}

double FourierSeries::max_abs_coeff() const {
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

TailStats FourierSeries::drop_small(double relative_threshold) {
  TailStats tail;
  const double floor = relative_threshold * max_abs_coeff();
  if (floor <= 0.0) return tail;
  for (Complex& c : coeffs_) {
    const double a = std::abs(c);
    if (a != 0.0 && a < floor) {
      tail.dropped_mass += a;
      tail.max_dropped = std::max(tail.max_dropped, a);
      ++tail.dropped_count;
      c = Complex(0.0, 0.0);
    }
  }
  return tail;
}

double FourierSeries::hermitian_defect() const {
  double worst = 0.0;
  for (std::int64_t i = 0; i < table_size(); ++i) {
    Mode k = mode_at(i);
    Mode mk{};
    for (int c = 0; c < dim_; ++c) mk[c] = -k[c];
    worst = std::max(worst, std::abs(coeffs_[i] - std::conj(coeffs_[index_of(mk)])));
  }
  return worst;
}

void FourierSeries::symmetrize() {
  for (std::int64_t i = 0; i < table_size(); ++i) {
    Mode k = mode_at(i);
    Mode mk{};
    for (int c = 0; c < dim_; ++c) mk[c] = -k[c];
    const std::int64_t j = index_of(mk);
    if (j < i) continue;
    const Complex avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
    coeffs_[i] = avg;
    coeffs_[j] = std::conj(avg);
  }
}

FourierSeries& FourierSeries::operator+=(const FourierSeries& other) {
  check_same_dim(*this, other);
  if (other.cutoff_ <= cutoff_) {
    other.for_each([&](const Mode& k, Complex c) { coeffs_[index_of(k)] += c; });
  } else {
    FourierSeries grown = with_cutoff(other.cutoff_);
    grown += other;
    *this = std::move(grown);
  }
  return *this;
}

FourierSeries& FourierSeries::operator-=(const FourierSeries& other) {
  FourierSeries neg = other;
  neg *= Complex(-1.0, 0.0);
  return *this += neg;
}

FourierSeries& FourierSeries::operator*=(Complex scalar) {
  for (Complex& c : coeffs_) c *= scalar;
  return *this;
}

FourierSeries FourierSeries::with_cutoff(int cutoff, TailStats* tail) const {
  FourierSeries out(dim_, cutoff);
  for_each([&](const Mode& k, Complex c) {
    if (out.in_range(k)) {
      out.coeffs_[out.index_of(k)] = c;
    } else if (tail != nullptr) {
      tail->dropped_mass += std::abs(c);
      tail->max_dropped = std::max(tail->max_dropped, std::abs(c));
      ++tail->dropped_count;
    }
  });
  return out;
}

double gevrey_norm(const FourierSeries& f, double beta, double radius) {
  if (beta < 1.0) throw Error(ErrorCode::InvalidArgument, "gevrey_norm requires beta >= 1");
  double sum = 0.0;
  f.for_each([&](const Mode& k, Complex c) {
    sum += std::exp(beta * radius * k_weight(k, f.dim(), beta)) * std::abs(c);
  });
  return sum;
}

double gevrey_norm(const FourierSeries& f, const GevreyParams& g) {
  return gevrey_norm(f, g.beta, g.radius);
}

double l1_norm(const FourierSeries& f) {
  double sum = 0.0;
  f.for_each([&](const Mode&, Complex c) { sum += std::abs(c); });
  return sum;
}

FourierSeries shift(const FourierSeries& f, std::span<const double> t) {
  if (t.size() != static_cast<std::size_t>(f.dim())) {
    throw Error(ErrorCode::DimensionMismatch, "shift vector dim mismatch");
  }
  FourierSeries out(f.dim(), f.cutoff());
  f.for_each([&](const Mode& k, Complex c) {
    double phase = 0.0;
    for (int i = 0; i < f.dim(); ++i) phase += k[i] * t[i];
    out.set_coeff(k, c * std::polar(1.0, phase));
  });
  return out;
}

FourierSeries directional_derivative(const FourierSeries& f, std::span<const double> alpha) {
  if (alpha.size() != static_cast<std::size_t>(f.dim())) {
    throw Error(ErrorCode::DimensionMismatch, "direction vector dim mismatch");
  }
  FourierSeries out(f.dim(), f.cutoff());
  f.for_each([&](const Mode& k, Complex c) {
    double ka = 0.0;
    for (int i = 0; i < f.dim(); ++i) ka += k[i] * alpha[i];
    out.set_coeff(k, Complex(0.0, ka) * c);
  });
  return out;
}

Complex average(const FourierSeries& f) { return f.coeff(Mode{}); }

Complex evaluate_at(const FourierSeries& f, std::span<const double> point) {
  if (point.size() != static_cast<std::size_t>(f.dim())) {
    throw Error(ErrorCode::DimensionMismatch, "evaluation point dim mismatch");
  }
  Complex sum(0.0, 0.0);
  f.for_each([&](const Mode& k, Complex c) {
    double phase = 0.0;
    for (int i = 0; i < f.dim(); ++i) phase += k[i] * point[i];
    sum += c * std::polar(1.0, phase);
  });
  return sum;
}

void check_same_dim(const FourierSeries& a, const FourierSeries& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "series dimensions differ");
  }
}

}  // namespace qpkam
