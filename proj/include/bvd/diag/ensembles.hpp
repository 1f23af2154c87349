#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "bvd/diag/norms.hpp"
#include "bvd/spectral/random.hpp"

namespace bvd::diag {

using spectral::Rng;

/// Evaluate fn(0..n-1) on `workers` threads; results keep index order.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t workers, Fn&& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<T> out(n);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto body = [&](std::size_t w) {
    try {
      for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
    } catch (...) {
      errors[w] = std::current_exception();
      next = n;
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

/// Smooth compactly supported bump amp * exp(-1 / (1 - rho^2)),
/// rho = |((x - cx) / ax, (y - cy) / ay)|, zero for rho >= 1.
inline Field bump(const Grid& g, double cx, double cy, double ax, double ay, double amp = 1.0) {
  return Field::sample(g, [=](double x, double y) {
    const double dx = (x - cx) / ax, dy = (y - cy) / ay;
    const double r2 = dx * dx + dy * dy;
    return r2 < 1.0 ? amp * std::exp(-1.0 / (1.0 - r2)) : 0.0;
  });
}

struct BumpShape {
  double cx, cy, ax, ay, amp;

  std::string describe() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "bump(%.4f,%.4f,%.4f,%.4f,%.4f)", cx, cy, ax, ay, amp);
    return buf;
  }
  Field sample(const Grid& g) const { return bump(g, cx, cy, ax, ay, amp); }
};

/// Random bump whose support stays at least `margin` (a fraction of the box)
/// away from the box edges.
inline BumpShape random_bump(Rng& rng, double lx, double ly, double margin = 0.05) {
  BumpShape b;
  b.ax = uniform(rng, 0.08, 0.3) * lx;
  b.ay = uniform(rng, 0.08, 0.3) * ly;
  b.cx = uniform(rng, margin * lx + b.ax, (1.0 - margin) * lx - b.ax);
  b.cy = uniform(rng, margin * ly + b.ay, (1.0 - margin) * ly - b.ay);
  b.amp = uniform(rng, 0.5, 2.0);
  return b;
}

/// Random band-limited field in the annulus [k_lo, k_hi], coherent (phases
/// aligned at a random point) or with independent phases.
struct BandShape {
  double k_lo = 0.0;
  double k_hi = 8.0;
  double slope = 0.0;
  bool coherent = false;

  std::string describe() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s[%.4g,%.4g]^%.3f", coherent ? "coherent" : "random", k_lo,
                  k_hi, slope);
    return buf;
  }
};

inline Field band_field(const Grid& g, Rng& rng, const BandShape& b) {
  spectral::SpectrumShape s;
  s.k_lo = b.k_lo;
  s.k_hi = b.k_hi;
  s.slope = b.slope;
  s.coherent = b.coherent;
  if (b.coherent) {
    s.x0 = uniform(rng, 0.0, g.lx());
    s.y0 = uniform(rng, 0.0, g.ly());
  }
  return spectral::random_field(g, rng, s);
}

/// Largest non-Nyquist wavenumber along an axis of g (2 pi box units).
inline double axis_kmax(const Grid& g) {
  return std::min(static_cast<double>(g.nx() / 2 - 1) * 2.0 * std::numbers::pi / g.lx(),
                  static_cast<double>(g.ny() / 2 - 1) * 2.0 * std::numbers::pi / g.ly());
}

}  // namespace bvd::diag
