#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "bvd/spectral/ops.hpp"

namespace bvd::spectral {

using Rng = std::mt19937_64;

/// Deterministic generator for a (seed, stream...) tuple.
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
  for (auto s : stream) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq full(words.begin(), words.end());
  return Rng(full);
}

/// Independent uniform samples in [-1, 1] at every grid point (not band-limited).
inline Field random_samples(const Grid& g, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (double& v : f.values()) v = u(rng);
  return f;
}

struct SpectrumShape {
  double k_lo = 0.0;   // smallest |k| kept (0 keeps the mean)
  double k_hi = 8.0;   // largest |k| kept
  double slope = 0.0;  // amplitude ~ |k|^slope
  bool coherent = false;  // all phases aligned at (x0, y0)
  double x0 = 0.0;
  double y0 = 0.0;
};

/// Random trigonometric polynomial with the given spectral envelope.
///
/// Incoherent fields draw Gaussian complex coefficients; coherent fields put
/// every mode in phase at (x0, y0), which concentrates the field into a peak
/// and probes the extremal side of sup-norm inequalities. Nyquist modes are
/// never populated. The result is scaled to unit L2 norm (unless identically 0).
inline SpectralField random_spectrum(const Grid& g, Rng& rng, const SpectrumShape& shape) {
  std::normal_distribution<double> n01(0.0, 1.0);
  SpectralField F(g);
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t iy = 0; iy < g.nyh(); ++iy) {
      if (g.nyquist(ix, iy)) continue;
      const double k = g.kmag(ix, iy);
      if (k < shape.k_lo || k > shape.k_hi) continue;
      const double env = k == 0.0 ? 1.0 : std::pow(k, shape.slope);
      Complex c;
      if (shape.coherent) {
        const double phase = -(g.kx(ix) * shape.x0 + g.ky(iy) * shape.y0);
        c = env * Complex(std::cos(phase), std::sin(phase));
      } else {
        const double a = n01(rng);
        const double b = n01(rng);
        c = env * Complex(a, b);
      }
      F(ix, iy) = c;
    }
  }
  F.enforce_hermitian();
  const double norm = parseval_l2(F);
  if (norm > 0.0) F *= Complex(1.0 / norm, 0.0);
  return F;
}

inline Field random_field(const Grid& g, Rng& rng, const SpectrumShape& shape) {
  return to_physical(random_spectrum(g, rng, shape));
}

}  // namespace bvd::spectral
