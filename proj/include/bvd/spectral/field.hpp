#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "bvd/spectral/grid.hpp"

namespace bvd::spectral {

using Complex = std::complex<double>;

/// Real scalar field sampled on a Grid.
class Field {
 public:
  explicit Field(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

  Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw SizeMismatch("field values: expected " + std::to_string(grid_.size()) + ", got " +
                         std::to_string(values_.size()));
    }
  }

  /// Samples fn(x, y) at every grid point.
  template <class Fn>
  static Field sample(const Grid& grid, Fn&& fn) {
    Field f(grid);
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
        f.values_[grid.index(ix, iy)] = fn(grid.x(ix), grid.y(iy));
      }
    }
    return f;
  }

  static Field constant(const Grid& grid, double c) {
    return Field(grid, std::vector<double>(grid.size(), c));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& data() const { return values_; }

  double operator()(std::size_t ix, std::size_t iy) const { return values_[grid_.index(ix, iy)]; }
  double& operator()(std::size_t ix, std::size_t iy) { return values_[grid_.index(ix, iy)]; }

  double grid_max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  double mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  Field& operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_, "field +=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_, "field -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

  /// Pointwise product (no dealiasing).
  friend Field operator*(const Field& a, const Field& b) {
    require_same_grid(a.grid_, b.grid_, "field product");
    Field r(a.grid_);
    for (std::size_t i = 0; i < a.values_.size(); ++i) r.values_[i] = a.values_[i] * b.values_[i];
    return r;
  }

  template <class Fn>
  Field map(Fn&& fn) const {
    Field r(grid_);
    std::transform(values_.begin(), values_.end(), r.values_.begin(), fn);
    return r;
  }

  bool operator==(const Field&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Max-norm distance between two fields on the same grid.
inline double max_abs_diff(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

/// Fourier-series coefficients in the half layout of Grid.
///
/// Normalized so that f(x, y) = sum_k c_k exp(i k.x); the inverse transform
/// needs no scaling. Hermitian symmetry is implied for the omitted ky < 0 half.
class SpectralField {
 public:
  explicit SpectralField(Grid grid) : grid_(grid), coeffs_(grid.spectral_size()) {}

  SpectralField(Grid grid, std::vector<Complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.spectral_size()) {
      throw SizeMismatch("spectral coefficients: expected " +
                         std::to_string(grid_.spectral_size()) + ", got " +
                         std::to_string(coeffs_.size()));
    }
  }

  const Grid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }

  Complex operator()(std::size_t ix, std::size_t iy) const {
    return coeffs_[grid_.spectral_index(ix, iy)];
  }
  Complex& operator()(std::size_t ix, std::size_t iy) {
    return coeffs_[grid_.spectral_index(ix, iy)];
  }

  /// Weight of column iy when summing over the full spectrum from the half layout.
  static double column_weight(const Grid& g, std::size_t iy) {
    return (iy == 0 || g.nyquist_y(iy)) ? 1.0 : 2.0;
  }

  /// Multiplies every coefficient by m(ix, iy).
  template <class Fn>
  SpectralField& apply(Fn&& m) {
    for (std::size_t ix = 0; ix < grid_.nx(); ++ix) {
      for (std::size_t iy = 0; iy < grid_.nyh(); ++iy) {
        coeffs_[grid_.spectral_index(ix, iy)] *= m(ix, iy);
      }
    }
    return *this;
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "spectral +=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "spectral -=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(Complex s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, Complex s) { return a *= s; }
  friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

  Complex mean() const { return coeffs_[0]; }

  /// Restores Hermitian symmetry in the self-conjugate columns (ky = 0 and Nyquist).
  void enforce_hermitian() {
    const std::size_t nx = grid_.nx();
    for (std::size_t iy : {std::size_t{0}, grid_.ny() / 2}) {
      for (std::size_t ix = 1; ix < nx / 2; ++ix) {
        Complex& a = coeffs_[grid_.spectral_index(ix, iy)];
        Complex& b = coeffs_[grid_.spectral_index(nx - ix, iy)];
        const Complex avg = 0.5 * (a + std::conj(b));
        a = avg;
        b = std::conj(avg);
      }
      for (std::size_t ix : {std::size_t{0}, nx / 2}) {
        Complex& a = coeffs_[grid_.spectral_index(ix, iy)];
        a = Complex(a.real(), 0.0);
      }
    }
  }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

}  // namespace bvd::spectral
