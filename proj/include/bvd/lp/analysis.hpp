#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "bvd/diag/norms.hpp"
#include "bvd/lp/shells.hpp"

namespace bvd::lp {

using spectral::Complex;
using spectral::Field;
using spectral::Grid;
using spectral::SpectralField;

/// Spectrum of block j of f.
inline SpectralField block_spectrum(const SpectralField& F, const ShellSystem& shells, int j,
                                    Flavor flavor) {
  return spectral::radial_multiplier(F, [&](double r) { return shells.multiplier(j, r, flavor); });
}

/// The family of dyadic blocks of a field.
struct DyadicDecomposition {
  Flavor flavor;
  int j_lo;                       // index of pieces[0]; -1 means pieces[0] is the low block
  std::vector<Field> pieces;      // pieces[j - j_lo]
  double zero_mode = 0.0;         // homogeneous only: the mean, which no shell sees
  int folded_below = 0;
  int folded_above = 0;

  int j_hi() const { return j_lo + static_cast<int>(pieces.size()) - 1; }
  const Field& piece(int j) const { return pieces.at(static_cast<std::size_t>(j - j_lo)); }
  bool has_low_block() const { return flavor == Flavor::inhomogeneous; }
  const Field& low_block() const { return pieces.front(); }

  /// Sum of all blocks (plus the mean for the homogeneous flavor).
  Field reconstruct() const {
    Field sum(pieces.front().grid());
    for (const auto& p : pieces) sum += p;
    if (flavor == Flavor::homogeneous) {
      for (double& v : sum.values()) v += zero_mode;
    }
    return sum;
  }
};

inline DyadicDecomposition decompose(const Field& f, Flavor flavor) {
  const ShellSystem shells(f.grid());
  const SpectralField F = spectral::to_spectral(f);
  DyadicDecomposition d{flavor, shells.j_lo(flavor), {}, 0.0, 0, shells.folded_above()};
  if (flavor == Flavor::homogeneous) {
    d.zero_mode = F.mean().real();
    d.folded_below = shells.folded_below();
  }
  for (int j = d.j_lo; j <= shells.j_max(); ++j) {
    d.pieces.push_back(spectral::to_physical(block_spectrum(F, shells, j, flavor)));
  }
  return d;
}

namespace detail {

inline double lp_of_block(const SpectralField& B, double p) {
  if (std::isinf(p)) return diag::sup_norm(B);
  return diag::lq_norm(spectral::to_physical(B), p);
}

inline double lq_sum(const std::vector<double>& terms, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double t : terms) m = std::max(m, t);
    return m;
  }
  double s = 0.0;
  for (double t : terms) s += std::pow(t, q);
  return std::pow(s, 1.0 / q);
}

}  // namespace detail

/// Besov norm || 2^{js} ||Delta_j f||_p ||_{l^q} over the representable blocks.
inline double besov_norm(const Field& f, double s, double p, double q, Flavor flavor) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw InvalidArgument("besov_norm: need p, q >= 1");
  const ShellSystem shells(f.grid());
  if (shells.j_max() < shells.j_lo(flavor)) throw InvalidArgument("besov_norm: empty dyadic range");
  const SpectralField F = spectral::to_spectral(f);
  std::vector<double> terms;
  for (int j = shells.j_lo(flavor); j <= shells.j_max(); ++j) {
    const double w = std::pow(2.0, s * j);
    terms.push_back(w * detail::lp_of_block(block_spectrum(F, shells, j, flavor), p));
  }
  return detail::lq_sum(terms, q);
}

/// Triebel-Lizorkin norm || (sum_j |2^{sj} Delta_j f|^q)^{1/q} ||_{L^p}.
inline double tl_norm(const Field& f, double s, double p, double q, Flavor flavor) {
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidArgument("tl_norm: need 1 <= p < inf");
  if (!(q >= 1.0)) throw InvalidArgument("tl_norm: need q >= 1");
  const auto d = decompose(f, flavor);
  const Grid& g = f.grid();
  Field aggregate(g);
  auto acc = aggregate.values();
  for (int j = d.j_lo; j <= d.j_hi(); ++j) {
    const double w = std::pow(2.0, s * j);
    const auto vals = d.piece(j).values();
    for (std::size_t i = 0; i < acc.size(); ++i) {
      const double a = w * std::abs(vals[i]);
      if (std::isinf(q)) {
        acc[i] = std::max(acc[i], a);
      } else {
        acc[i] += std::pow(a, q);
      }
    }
  }
  if (!std::isinf(q)) {
    for (double& v : acc) v = std::pow(v, 1.0 / q);
  }
  return diag::lq_norm(aggregate, p);
}

/// Sharp split f = low + high at radius R: low keeps |k| <= R.
inline std::pair<SpectralField, SpectralField> split_low_high(const SpectralField& F, double R) {
  if (!(R > 0.0)) throw InvalidArgument("split_low_high: R must be positive");
  SpectralField low = spectral::radial_multiplier(F, [R](double k) { return k <= R ? 1.0 : 0.0; });
  SpectralField high = spectral::radial_multiplier(F, [R](double k) { return k <= R ? 0.0 : 1.0; });
  return {std::move(low), std::move(high)};
}

inline std::pair<Field, Field> split_low_high(const Field& f, double R) {
  auto [lo, hi] = split_low_high(spectral::to_spectral(f), R);
  return {spectral::to_physical(lo), spectral::to_physical(hi)};
}

/// Bernstein ratio ||(-Lap)^a Delta_j f||_q / (2^{2aj + 2j(1/p - 1/q)} ||Delta_j f||_p),
/// with homogeneous blocks; 0 when Delta_j f vanishes.
inline double bernstein_ratio(const Field& f, int j, double p, double q, double alpha) {
  if (!(p >= 1.0) || !(q >= p)) throw InvalidArgument("bernstein_ratio: need 1 <= p <= q");
  if (alpha < 0.0) throw InvalidArgument("bernstein_ratio: alpha must be >= 0");
  const ShellSystem shells(f.grid());
  const SpectralField B = block_spectrum(spectral::to_spectral(f), shells, j, Flavor::homogeneous);
  bool zero = true;
  for (auto c : B.coeffs()) {
    if (c != Complex(0.0, 0.0)) {
      zero = false;
      break;
    }
  }
  if (zero) return 0.0;
  const double denom_norm = detail::lp_of_block(B, p);
  if (denom_norm == 0.0) return 0.0;
  const double num = detail::lp_of_block(spectral::fractional_laplacian(B, alpha), q);
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  const double scale = std::pow(2.0, 2.0 * alpha * j + 2.0 * j * (inv_p - inv_q));
  return num / (scale * denom_norm);
}

}  // namespace bvd::lp
