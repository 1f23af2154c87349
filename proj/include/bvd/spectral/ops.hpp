#pragma once

#include <cmath>
#include <cstdlib>
#include <utility>

#include "bvd/spectral/fft.hpp"

namespace bvd::spectral {

/// Coefficient at k times (i k_axis)^order, with Nyquist row and column zeroed.
inline SpectralField derivative(SpectralField F, Axis axis, int order) {
  if (order < 1) throw InvalidArgument("derivative: order must be positive");
  const Grid& g = F.grid();
  // (i k)^order = i^order k^order; i^order cycles through 1, i, -1, -i.
  static constexpr Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = i_pow[order % 4];
  F.apply([&](std::size_t ix, std::size_t iy) -> Complex {
    if (g.nyquist(ix, iy)) return 0.0;
    const double k = axis == Axis::x ? g.kx(ix) : g.ky(iy);
    return phase * std::pow(k, order);
  });
  return F;
}

inline Field derivative(const Field& f, Axis axis, int order = 1) {
  return to_physical(derivative(to_spectral(f), axis, order));
}

/// True when the integer wave index lies inside the 2/3-rule band.
inline bool in_dealias_band(const Grid& g, std::size_t ix, std::size_t iy) {
  const long ax = std::labs(g.wave_index_x(ix));
  const long ay = std::labs(g.wave_index_y(iy));
  // |k| > n/3 is removed; compare 3|k| > n to stay in integers.
  return 3 * ax <= static_cast<long>(g.nx()) && 3 * ay <= static_cast<long>(g.ny());
}

/// 2/3-rule truncation.
inline SpectralField dealias(SpectralField F) {
  const Grid& g = F.grid();
  F.apply([&](std::size_t ix, std::size_t iy) { return in_dealias_band(g, ix, iy) ? 1.0 : 0.0; });
  return F;
}

/// Spectral divergence u_x + v_y.
inline SpectralField divergence(const SpectralField& U, const SpectralField& V) {
  return derivative(U, Axis::x, 1) + derivative(V, Axis::y, 1);
}

/// Orthogonal projection onto divergence-free fields: P = I - k k^T / |k|^2.
/// The k = 0 mode is left unchanged, and so are Nyquist modes: the discrete
/// divergence vanishes on them, so they already lie in its kernel.
inline std::pair<SpectralField, SpectralField> leray_project(SpectralField U, SpectralField V) {
  require_same_grid(U.grid(), V.grid(), "leray_project");
  const Grid& g = U.grid();
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    const double kx = g.kx(ix);
    for (std::size_t iy = 0; iy < g.nyh(); ++iy) {
      if ((ix == 0 && iy == 0) || g.nyquist(ix, iy)) continue;
      const double ky = g.ky(iy);
      const double k2 = kx * kx + ky * ky;
      Complex& u = U(ix, iy);
      Complex& v = V(ix, iy);
      const Complex kdotu = (kx * u + ky * v) / k2;
      u -= kx * kdotu;
      v -= ky * kdotu;
    }
  }
  return {std::move(U), std::move(V)};
}

inline std::pair<Field, Field> leray_project(const Field& u, const Field& v) {
  require_same_grid(u.grid(), v.grid(), "leray_project");
  auto [U, V] = leray_project(to_spectral(u), to_spectral(v));
  return {to_physical(U), to_physical(V)};
}

/// Laplacian as the multiplier -|k|^2, Nyquist zeroed.
inline SpectralField laplacian(SpectralField F) {
  const Grid& g = F.grid();
  F.apply([&](std::size_t ix, std::size_t iy) -> double {
    if (g.nyquist(ix, iy)) return 0.0;
    const double k = g.kmag(ix, iy);
    return -k * k;
  });
  return F;
}

inline Field laplacian(const Field& f) { return to_physical(laplacian(to_spectral(f))); }

struct PoissonSolution {
  Field phi;
  double removed_mean;  // mean of the right-hand side that had to be discarded
};

/// Mean-zero phi with Laplacian(phi) = rhs - mean(rhs), via the multiplier -1/|k|^2.
/// The zero mode and Nyquist lines of phi are set to 0.
inline SpectralField poisson_solve(SpectralField rhs) {
  const Grid& g = rhs.grid();
  rhs.apply([&](std::size_t ix, std::size_t iy) -> double {
    if ((ix == 0 && iy == 0) || g.nyquist(ix, iy)) return 0.0;
    const double k = g.kmag(ix, iy);
    return -1.0 / (k * k);
  });
  return rhs;
}

inline PoissonSolution poisson_solve(const Field& rhs) {
  SpectralField R = to_spectral(rhs);
  const double mean = R.mean().real();
  return {to_physical(poisson_solve(std::move(R))), mean};
}

/// Generic radial multiplier m(|k|), applied to every mode.
template <class Fn>
SpectralField radial_multiplier(SpectralField F, Fn&& m) {
  const Grid& g = F.grid();
  F.apply([&](std::size_t ix, std::size_t iy) { return m(g.kmag(ix, iy)); });
  return F;
}

/// Fractional Laplacian (-Laplacian)^alpha as |k|^{2 alpha}, zero at k = 0.
inline SpectralField fractional_laplacian(SpectralField F, double alpha) {
  if (alpha == 0.0) return F;
  return radial_multiplier(std::move(F), [alpha](double k) {
    return k == 0.0 ? 0.0 : std::pow(k, 2.0 * alpha);
  });
}

/// Sum over the full spectrum of w(k) |c_k|^2, expanded from the half layout.
template <class Fn>
double weighted_energy(const SpectralField& F, Fn&& w) {
  const Grid& g = F.grid();
  double s = 0.0;
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t iy = 0; iy < g.nyh(); ++iy) {
      const double a = std::norm(F(ix, iy));
      if (a == 0.0) continue;
      s += SpectralField::column_weight(g, iy) * w(ix, iy) * a;
    }
  }
  return s;
}

/// L2 norm from coefficients (Parseval): area * sum |c_k|^2.
inline double parseval_l2(const SpectralField& F) {
  return std::sqrt(F.grid().area() * weighted_energy(F, [](std::size_t, std::size_t) { return 1.0; }));
}

}  // namespace bvd::spectral
