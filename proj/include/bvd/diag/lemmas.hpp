#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bvd/diag/record.hpp"
#include "bvd/lp/analysis.hpp"

namespace bvd::diag {

enum class TrialStatus { ok, skipped, rejected };

inline const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok:
      return "ok";
    case TrialStatus::skipped:
      return "skipped";
    case TrialStatus::rejected:
      return "rejected";
  }
  return "?";
}

/// One evaluation of an inequality lhs <= C * rhs_factor.
struct LemmaTrial {
  std::string lemma;
  std::vector<std::pair<std::string, double>> params;
  std::string field;  // descriptor of the input
  double lhs = 0.0;
  double rhs_factor = 0.0;
  double empirical_C = 0.0;
  TrialStatus status = TrialStatus::ok;
  std::string note;

  bool counted() const { return status == TrialStatus::ok; }

  void finish() {
    if (lhs == 0.0) {
      empirical_C = 0.0;
    } else {
      empirical_C = lhs / rhs_factor;
    }
  }
};

/// Single-line record: key=value pairs separated by spaces.
inline std::string to_line(const LemmaTrial& t) {
  std::string out = "lemma=" + t.lemma;
  for (const auto& [k, v] : t.params) out += " " + k + "=" + format_value(v);
  out += " field=" + t.field;
  out += " lhs=" + format_value(t.lhs);
  out += " rhs_factor=" + format_value(t.rhs_factor);
  out += " empirical_C=" + format_value(t.empirical_C);
  out += " status=" + std::string(to_string(t.status));
  if (!t.note.empty()) out += " note=" + t.note;
  return out;
}

/// max over the r-grid of ||f||_r / sqrt(r log r).
inline double lebesgue_log_ratio(const Field& f, const std::vector<double>& r_grid) {
  std::vector<double> norms;
  for (double r : r_grid) norms.push_back(lq_norm(f, r));
  double m = 0.0;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    m = std::max(m, norms[i] / std::sqrt(r_grid[i] * std::log(r_grid[i])));
  }
  return m;
}

/// Dyadic cutoff index floor(log2(e + ||f||_{H^s}) / (s - 1)) used to balance
/// the low and high parts; values below 2 make sqrt(N log N) degenerate.
inline int interpolation_cutoff(double hs_norm, double s) {
  return static_cast<int>(std::floor(std::log2(std::numbers::e + hs_norm) / (s - 1.0)));
}

/// ||f||_inf against sup_r ||f||_r / sqrt(r log r) times
/// sqrt(log(e + ||f||_{H^s}) log log(e + ||f||_{H^s})).
inline LemmaTrial check_interpolation(const Field& f, double s,
                                      const std::vector<double>& r_grid = default_r_grid,
                                      std::string descriptor = "field") {
  if (!(s > 1.0)) throw InvalidArgument("check_interpolation: need s > 1");
  LemmaTrial t;
  t.lemma = "interpolation";
  t.params = {{"s", s}};
  t.field = std::move(descriptor);
  if (f.grid_max_abs() == 0.0) {
    t.status = TrialStatus::skipped;
    t.note = "zero_field";
    return t;
  }
  const double hs = sobolev_norm(f, s);
  t.lhs = sup_norm(f);
  t.rhs_factor = lebesgue_log_ratio(f, r_grid) * std::sqrt(loglog_factor(hs));
  t.finish();
  if (interpolation_cutoff(hs, s) < 2) {
    t.status = TrialStatus::skipped;
    t.note = "cutoff_below_2";
  }
  return t;
}

/// True when f vanishes (relative to its max) on the outer `margin` grid
/// lines, i.e. its support stays strictly inside the box.
inline bool interior_support(const Field& f, std::size_t margin) {
  const Grid& g = f.grid();
  const double tol = 1e-14 * f.grid_max_abs();
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t iy = 0; iy < g.ny(); ++iy) {
      const bool edge = ix < margin || ix >= g.nx() - margin || iy < margin || iy >= g.ny() - margin;
      if (edge && std::abs(f(ix, iy)) > tol) return false;
    }
  }
  return true;
}

/// Factors of the triple-product bound.
struct TripleNorms {
  double f2, g2, gy2, h_mid, hx2;
};

inline TripleNorms triple_norms(const Field& f, const Field& g, const Field& h, double q) {
  return {lq_norm(f, 2.0), lq_norm(g, 2.0),
          lq_norm(spectral::derivative(g, Axis::y), 2.0), lq_norm(h, 2.0 * (q - 1.0)),
          lq_norm(spectral::derivative(h, Axis::x), 2.0)};
}

/// int |f g h| against ||f||_2 ||g||_2^{1-1/q} ||g_y||_2^{1/q}
/// ||h||_{2(q-1)}^{1-1/q} ||h_x||_2^{1/q}. Inputs must be supported strictly
/// inside the box; otherwise the trial is rejected.
inline LemmaTrial check_triple_product(const Field& f, const Field& g, const Field& h, double q,
                                       std::string descriptor = "bumps",
                                       std::size_t margin = 2) {
  if (!(q >= 2.0) || std::isinf(q)) throw InvalidArgument("check_triple_product: need 2 <= q < inf");
  spectral::require_same_grid(f.grid(), g.grid(), "triple product");
  spectral::require_same_grid(f.grid(), h.grid(), "triple product");
  LemmaTrial t;
  t.lemma = "triple_product";
  t.params = {{"q", q}};
  t.field = std::move(descriptor);
  for (const Field* x : {&f, &g, &h}) {
    if (x->grid_max_abs() != 0.0 && !interior_support(*x, margin)) {
      t.status = TrialStatus::rejected;
      t.note = "support_touches_boundary";
      return t;
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.data().size(); ++i) {
    s += std::abs(f.data()[i] * g.data()[i] * h.data()[i]);
  }
  t.lhs = s * f.grid().cell_area();
  const TripleNorms n = triple_norms(f, g, h, q);
  const double a = 1.0 - 1.0 / q, b = 1.0 / q;
  t.rhs_factor = n.f2 * std::pow(n.g2, a) * std::pow(n.gy2, b) * std::pow(n.h_mid, a) *
                 std::pow(n.hx2, b);
  t.finish();
  return t;
}

/// q = 3 form: ||f||_2 ||g||_2^{2/3} ||g_y||_2^{1/3} ||h||_4^{2/3} ||h_x||_2^{1/3}.
inline LemmaTrial triple_product_q3(const Field& f, const Field& g, const Field& h) {
  LemmaTrial t = check_triple_product(f, g, h, 3.0, "q3_preset");
  if (t.status != TrialStatus::ok) return t;
  const double gy = lq_norm(spectral::derivative(g, Axis::y), 2.0);
  const double hx = lq_norm(spectral::derivative(h, Axis::x), 2.0);
  t.rhs_factor = lq_norm(f, 2.0) * std::cbrt(lq_norm(g, 2.0) * lq_norm(g, 2.0) * gy) *
                 std::cbrt(lq_norm(h, 4.0) * lq_norm(h, 4.0) * hx);
  t.finish();
  return t;
}

/// q = 2 form: ||f||_2 (||g||_2 ||g_y||_2 ||h||_2 ||h_x||_2)^{1/2}.
inline LemmaTrial triple_product_q2(const Field& f, const Field& g, const Field& h) {
  LemmaTrial t = check_triple_product(f, g, h, 2.0, "q2_preset");
  if (t.status != TrialStatus::ok) return t;
  const double gy = lq_norm(spectral::derivative(g, Axis::y), 2.0);
  const double hx = lq_norm(spectral::derivative(h, Axis::x), 2.0);
  t.rhs_factor = lq_norm(f, 2.0) * std::sqrt(lq_norm(g, 2.0) * gy * lq_norm(h, 2.0) * hx);
  t.finish();
  return t;
}

/// Sharp split at radius R. Returns, in order:
///  low_sup:   ||f_low||_inf     vs sqrt(log R) ||f||_{H^1}
///  high_lq:   ||f_high||_q      vs q R^{-2/q} ||f||_{H^1}
///  high_pass: ||f_high||_q      vs ||f||_q
/// Low/high split trials for one field over several exponents: low_sup
/// first, then high_lq and high_pass for each q in order.
inline std::vector<LemmaTrial> check_low_high_sweep(const Field& f, double R,
                                                    const std::vector<double>& qs,
                                                    const std::string& descriptor = "field") {
  if (!(R >= 4.0)) throw InvalidArgument("check_low_high: need R >= 4");
  for (double q : qs) {
    if (!(q >= 2.0) || std::isinf(q)) throw InvalidArgument("check_low_high: need 2 <= q < inf");
  }
  const auto F = spectral::to_spectral(f);
  const auto [lo, hi] = lp::split_low_high(F, R);
  const double h1 = sobolev_norm(F, 1.0);
  const Field hi_phys = spectral::to_physical(hi);

  std::vector<LemmaTrial> out;
  LemmaTrial low;
  low.lemma = "low_sup";
  low.params = {{"R", R}};
  low.field = descriptor;
  low.lhs = sup_norm(lo);
  low.rhs_factor = std::sqrt(std::log(R)) * h1;
  low.finish();
  out.push_back(std::move(low));
  for (double q : qs) {
    const double hi_q = lq_norm(hi_phys, q);
    LemmaTrial high, pass;
    high.lemma = "high_lq";
    pass.lemma = "high_pass";
    for (auto* t : {&high, &pass}) {
      t->params = {{"R", R}, {"q", q}};
      t->field = descriptor;
      t->lhs = hi_q;
    }
    high.rhs_factor = q * std::pow(R, -2.0 / q) * h1;
    pass.rhs_factor = lq_norm(f, q);
    high.finish();
    pass.finish();
    out.push_back(std::move(high));
    out.push_back(std::move(pass));
  }
  return out;
}

inline std::array<LemmaTrial, 3> check_low_high(const Field& f, double R, double q,
                                                std::string descriptor = "field") {
  auto v = check_low_high_sweep(f, R, {q}, descriptor);
  return {std::move(v[0]), std::move(v[1]), std::move(v[2])};
}

}  // namespace bvd::diag
