#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "bvd/spectral/ops.hpp"

namespace bvd::diag {

using spectral::Complex;
using spectral::Field;
using spectral::Grid;
using spectral::SpectralField;

namespace detail {

// Point evaluation of the trigonometric interpolant defined by a spectrum,
// with first and second derivatives. Nyquist modes use cos(k x) so the
// interpolant is real (same convention as pad_spectrum).
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const SpectralField& F) {
    const Grid& g = F.grid();
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      for (std::size_t iy = 0; iy < g.nyh(); ++iy) {
        const Complex c = F(ix, iy);
        if (c == Complex(0.0, 0.0)) continue;
        modes_.push_back({g.kx(ix), g.ky(iy), SpectralField::column_weight(g, iy) * c,
                          g.nyquist_x(ix), g.nyquist_y(iy)});
      }
    }
  }

  struct Eval {
    double value = 0.0;
    double gx = 0.0, gy = 0.0;
    double hxx = 0.0, hxy = 0.0, hyy = 0.0;
  };

  Eval at(double x, double y) const {
    Eval e;
    for (const auto& m : modes_) {
      // Factor X(x) and its derivatives.
      Complex X, Xp, Xpp;
      if (m.nyq_x) {
        X = std::cos(m.kx * x);
        Xp = -m.kx * std::sin(m.kx * x);
      } else {
        X = Complex(std::cos(m.kx * x), std::sin(m.kx * x));
        Xp = Complex(0.0, m.kx) * X;
      }
      Xpp = -m.kx * m.kx * X;
      Complex Y, Yp, Ypp;
      if (m.nyq_y) {
        Y = std::cos(m.ky * y);
        Yp = -m.ky * std::sin(m.ky * y);
      } else {
        Y = Complex(std::cos(m.ky * y), std::sin(m.ky * y));
        Yp = Complex(0.0, m.ky) * Y;
      }
      Ypp = -m.ky * m.ky * Y;
      e.value += (m.c * X * Y).real();
      e.gx += (m.c * Xp * Y).real();
      e.gy += (m.c * X * Yp).real();
      e.hxx += (m.c * Xpp * Y).real();
      e.hxy += (m.c * Xp * Yp).real();
      e.hyy += (m.c * X * Ypp).real();
    }
    return e;
  }

  bool empty() const { return modes_.empty(); }

 private:
  struct Mode {
    double kx, ky;
    Complex c;
    bool nyq_x, nyq_y;
  };
  std::vector<Mode> modes_;
};

// Newton ascent of s*f starting from (x, y); returns the best |f| found.
inline double polish_peak(const TrigInterpolant& f, double x, double y, double start_abs,
                          double step_cap) {
  auto e = f.at(x, y);
  const double s = e.value >= 0.0 ? 1.0 : -1.0;
  double best = s * e.value;
  for (int it = 0; it < 30; ++it) {
    const double gx = s * e.gx, gy = s * e.gy;
    const double hxx = s * e.hxx, hxy = s * e.hxy, hyy = s * e.hyy;
    const double det = hxx * hyy - hxy * hxy;
    double dx, dy;
    if (hxx < 0.0 && det > 0.0) {
      dx = -(hyy * gx - hxy * gy) / det;
      dy = -(-hxy * gx + hxx * gy) / det;
    } else {
      dx = gx;
      dy = gy;
    }
    const double len = std::hypot(dx, dy);
    if (len == 0.0) break;
    if (len > step_cap) {
      dx *= step_cap / len;
      dy *= step_cap / len;
    }
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      auto trial = f.at(x + dx, y + dy);
      if (s * trial.value > best) {
        x += dx;
        y += dy;
        best = s * trial.value;
        e = trial;
        improved = true;
        break;
      }
      dx *= 0.5;
      dy *= 0.5;
    }
    if (!improved || std::hypot(dx, dy) < 1e-14) break;
  }
  return std::max(best, start_abs);
}

}  // namespace detail

/// Continuum sup norm of the trigonometric interpolant of F.
///
/// Evaluated on a 2x zero-padded grid; the few largest local peaks are then
/// refined by Newton ascent on the interpolant itself.
inline double sup_norm(const SpectralField& F) {
  const SpectralField padded = spectral::pad_spectrum(F, 2);
  const Field fine = spectral::to_physical(padded);
  const Grid& g = fine.grid();
  const double grid_max = fine.grid_max_abs();
  if (grid_max == 0.0) return 0.0;

  struct Candidate {
    double value;
    std::size_t ix, iy;
  };
  std::vector<Candidate> peaks;
  const std::size_t nx = g.nx(), ny = g.ny();
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double a = std::abs(fine(ix, iy));
      if (a < 0.99 * grid_max) continue;
      bool is_peak = true;
      for (int ox = -1; ox <= 1 && is_peak; ++ox) {
        for (int oy = -1; oy <= 1; ++oy) {
          if (ox == 0 && oy == 0) continue;
          const std::size_t jx = (ix + nx + ox) % nx;
          const std::size_t jy = (iy + ny + oy) % ny;
          if (std::abs(fine(jx, jy)) > a) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) peaks.push_back({a, ix, iy});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.ix != b.ix ? a.ix < b.ix : a.iy < b.iy;
  });
  if (peaks.size() > 4) peaks.resize(4);

  const detail::TrigInterpolant interp(F);
  const double cap = 0.5 * std::min(g.dx(), g.dy());
  double best = grid_max;
  for (const auto& p : peaks) {
    best = std::max(best, detail::polish_peak(interp, g.x(p.ix), g.y(p.iy), p.value, cap));
  }
  return best;
}

inline double sup_norm(const Field& f) { return sup_norm(spectral::to_spectral(f)); }

/// L^q norm over the periodic box. Quadrature is the rectangle rule, which is
/// the trapezoidal rule for periodic integrands; q = infinity uses sup_norm.
inline double lq_norm(const Field& f, double q) {
  if (std::isinf(q)) return sup_norm(f);
  if (!(q >= 1.0)) throw InvalidArgument("lq_norm: q must be >= 1");
  const double m = f.grid_max_abs();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  if (q == 2.0) {
    for (double v : f.values()) s += v * v;
    return std::sqrt(s * f.grid().cell_area());
  }
  // Scaled by the grid max so that large q does not overflow.
  for (double v : f.values()) s += std::pow(std::abs(v) / m, q);
  return m * std::pow(s * f.grid().cell_area(), 1.0 / q);
}

/// Vector L^q norm || |(a, b)| ||_q.
inline double lq_norm(const Field& a, const Field& b, double q) {
  spectral::require_same_grid(a.grid(), b.grid(), "lq_norm pair");
  Field mag(a.grid());
  for (std::size_t i = 0; i < mag.data().size(); ++i) {
    mag.values()[i] = std::hypot(a.data()[i], b.data()[i]);
  }
  if (std::isinf(q)) return mag.grid_max_abs();
  return lq_norm(mag, q);
}

/// H^s norm via the multiplier (1 + |k|^2)^{s/2}; the homogeneous variant uses |k|^s.
inline double sobolev_norm(const SpectralField& F, double s, bool homogeneous = false) {
  const Grid& g = F.grid();
  const double e = spectral::weighted_energy(F, [&](std::size_t ix, std::size_t iy) {
    const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy);
    if (homogeneous) return k2 == 0.0 ? 0.0 : std::pow(k2, s);
    return std::pow(1.0 + k2, s);
  });
  return std::sqrt(g.area() * e);
}

inline double sobolev_norm(const Field& f, double s, bool homogeneous = false) {
  return sobolev_norm(spectral::to_spectral(f), s, homogeneous);
}

}  // namespace bvd::diag
