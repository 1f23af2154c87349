#pragma once

#include <cmath>
#include <string>

#include "bvd/spectral/grid.hpp"

namespace bvd::lp {

enum class Flavor { homogeneous, inhomogeneous };

inline const char* to_string(Flavor f) {
  return f == Flavor::homogeneous ? "homogeneous" : "inhomogeneous";
}

/// Smooth radial cutoff: 1 on [0, 1], 0 on [2, inf), C-infinity in between.
/// Built from the exp(-1/x) mollifier.
inline double cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  auto h = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = h(2.0 - r);
  const double b = h(r - 1.0);
  return a / (a + b);
}

/// Dyadic bump psi(r) = cutoff(r) - cutoff(2r), supported in [1/2, 2].
inline double bump(double r) { return cutoff(r) - cutoff(2.0 * r); }

/// Littlewood-Paley shell system truncated to what a grid can represent.
///
/// Shell j multiplies the spectrum by psi(2^-j |k|). Only j in [j_min, j_max]
/// is kept: shell j_max absorbs every shell above it (sum_{j >= j_max}), and in
/// the homogeneous flavor shell j_min = 0 absorbs every shell below it. Both
/// folded blocks still sum the partition of unity exactly; the number of folded
/// shells that actually touch grid wavenumbers is reported.
class ShellSystem {
 public:
  explicit ShellSystem(const spectral::Grid& grid) : grid_(grid) {
    j_max_ = static_cast<int>(std::ceil(std::log2(grid.kmax()))) - 1;
    if (j_max_ < j_min_) j_max_ = j_min_;
    // Shells j < 0 whose support [2^{j-1}, 2^{j+1}] reaches the smallest
    // nonzero wavenumber.
    const double lo = std::log2(grid.kmin()) - 1.0;
    folded_below_ = 0;
    for (int j = -1; j > lo; --j) ++folded_below_;
    // Shells above j_max that still reach kmax.
    folded_above_ = 0;
    for (int j = j_max_ + 1; std::ldexp(1.0, j - 1) < grid.kmax(); ++j) ++folded_above_;
  }

  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  /// Lowest index of the decomposition for a flavor (-1 is the low block).
  int j_lo(Flavor f) const { return f == Flavor::inhomogeneous ? -1 : j_min_; }
  int folded_below() const { return folded_below_; }
  int folded_above() const { return folded_above_; }
  const spectral::Grid& grid() const { return grid_; }

  /// Untruncated bump psi(2^-j r).
  static double raw_shell(int j, double r) { return bump(std::ldexp(r, -j)); }

  /// Multiplier of block j at radius r, including folding.
  double multiplier(int j, double r, Flavor flavor) const {
    if (flavor == Flavor::inhomogeneous) {
      if (j == -1) return cutoff(2.0 * r);
      if (j < 0 || j > j_max_) return 0.0;
      if (j == j_max_) return 1.0 - cutoff(std::ldexp(r, 1 - j));
      return raw_shell(j, r);
    }
    if (j < j_min_ || j > j_max_) return 0.0;
    if (r == 0.0) return 0.0;
    // Block j = cutoff(2^-j r) - cutoff(2^{1-j} r); a folded end replaces
    // one term by its limit.
    const double outer = j == j_max_ ? 1.0 : cutoff(std::ldexp(r, -j));
    const double inner = j == j_min_ ? 0.0 : cutoff(std::ldexp(r, 1 - j));
    return outer - inner;
  }

 private:
  spectral::Grid grid_;
  int j_min_ = 0;
  int j_max_ = 0;
  int folded_below_ = 0;
  int folded_above_ = 0;
};

}  // namespace bvd::lp
