#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bvd/diag/norms.hpp"
#include "bvd/solver/dynamics.hpp"

namespace bvd::diag {

using solver::State;
using spectral::Axis;

/// Exponents of the tracked L^q norms.
inline const std::vector<double> default_q_grid{2, 4, 8, 16, 32, 64};
/// Values of r in sup_r ||v||_{2r} / sqrt(r log r).
inline const std::vector<double> default_r_grid{2, 3, 4, 6, 8, 12, 16, 24, 32};

struct Grids {
  std::vector<double> q = default_q_grid;
  std::vector<double> r = default_r_grid;

  void validate() const {
    if (q.empty() || r.empty()) throw InvalidArgument("diagnostics: empty q or r grid");
    for (double x : q) {
      if (!(x >= 1.0) || std::isinf(x)) {
        throw InvalidArgument("diagnostics: q-grid entries must be in [1, inf)");
      }
    }
    for (double x : r) {
      if (!(x > 1.0) || std::isinf(x)) {
        throw InvalidArgument("diagnostics: r-grid entries must be in (1, inf)");
      }
    }
  }
};

/// ||f||_q^q evaluated on a 2x zero-padded grid, so the quadrature is exact
/// for band-limited f and q <= 4.
inline double padded_power(const spectral::SpectralField& F, double q) {
  const Field f = spectral::to_physical(spectral::pad_spectrum(F, 2));
  double s = 0.0;
  for (double x : f.data()) s += std::pow(std::abs(x), q);
  return s * f.grid().cell_area();
}

/// int |theta|^{q-2} theta_y^2, on the 2x padded grid.
inline double theta_dissipation(const spectral::SpectralField& T, double q) {
  const Field th = spectral::to_physical(spectral::pad_spectrum(T, 2));
  const Field ty =
      spectral::to_physical(spectral::pad_spectrum(spectral::derivative(T, Axis::y, 1), 2));
  double s = 0.0;
  for (std::size_t i = 0; i < th.data().size(); ++i) {
    const double w = q == 2.0 ? 1.0 : std::pow(std::abs(th.data()[i]), q - 2.0);
    s += w * ty.data()[i] * ty.data()[i];
  }
  return s * th.grid().cell_area();
}

/// Integrands of the running time integrals at one instant.
struct Rates {
  double gradp2 = 0.0;    // ||grad p||_2^2
  double uyvy2 = 0.0;     // ||(u_y, v_y)||_2^2
  double theta_diss2 = 0.0;  // int theta_y^2
  double theta_diss4 = 0.0;  // int theta^2 theta_y^2

  bool operator==(const Rates&) const = default;
};

inline Rates rates(const State& s, bool dealias = true) {
  const spectral::SpectralField P = spectral::poisson_solve(solver::pressure_rhs(s, dealias));
  const auto U = spectral::to_spectral(s.u);
  const auto V = spectral::to_spectral(s.v);
  const auto T = spectral::to_spectral(s.theta);
  Rates r;
  r.gradp2 = std::pow(sobolev_norm(P, 1.0, true), 2);
  auto sq = [](double x) { return x * x; };
  r.uyvy2 = sq(spectral::parseval_l2(spectral::derivative(U, Axis::y, 1))) +
            sq(spectral::parseval_l2(spectral::derivative(V, Axis::y, 1)));
  r.theta_diss2 = theta_dissipation(T, 2.0);
  r.theta_diss4 = theta_dissipation(T, 4.0);
  return r;
}

/// Running time integrals and the reference values of the initial state.
/// Integrals are advanced by the trapezoid rule on every solver step.
struct Accumulators {
  double t0 = 0.0;
  double uv0_l2 = 0.0;      // ||(u0, v0)||_2
  double theta0_l2 = 0.0;   // ||theta0||_2
  double theta0_pow2 = 0.0; // ||theta0||_2^2
  double theta0_pow4 = 0.0; // ||theta0||_4^4
  std::vector<double> v0_2r;  // ||v0||_{2r} over the r-grid

  double gradp2_int = 0.0;
  double uyvy2_int = 0.0;
  double theta_diss2_int = 0.0;
  double theta_diss4_int = 0.0;
  Rates last;  // integrands at the latest state

  static Accumulators start(const State& s0, const Grids& grids = {}, bool dealias = true) {
    Accumulators a;
    a.t0 = s0.t;
    a.uv0_l2 = lq_norm(s0.u, s0.v, 2.0);
    a.theta0_l2 = lq_norm(s0.theta, 2.0);
    const auto T = spectral::to_spectral(s0.theta);
    a.theta0_pow2 = padded_power(T, 2.0);
    a.theta0_pow4 = padded_power(T, 4.0);
    for (double r : grids.r) a.v0_2r.push_back(lq_norm(s0.v, 2.0 * r));
    a.last = rates(s0, dealias);
    return a;
  }

  /// Advance the integrals across one step ending in `after`.
  void advance(const State& before, const State& after, bool dealias = true) {
    const double h = after.t - before.t;
    const Rates now = rates(after, dealias);
    gradp2_int += 0.5 * h * (last.gradp2 + now.gradp2);
    uyvy2_int += 0.5 * h * (last.uyvy2 + now.uyvy2);
    theta_diss2_int += 0.5 * h * (last.theta_diss2 + now.theta_diss2);
    theta_diss4_int += 0.5 * h * (last.theta_diss4 + now.theta_diss4);
    last = now;
  }

  bool operator==(const Accumulators&) const = default;
};

/// One time sample of every tracked functional.
struct DiagnosticsRecord {
  std::size_t step = 0;
  double t = 0.0;
  std::vector<double> lq_v;        // ||v||_q, q in the q-grid
  std::vector<double> v_2r;        // ||v||_{2r}, r in the r-grid
  double sup_ratio = 0.0;          // max_r ||v||_{2r} / sqrt(r log r)
  double growth_B = 0.0;           // max_r (||v||_{2r} - ||v0||_{2r}) / sqrt(r log r)
  double l2_uv = 0.0;
  double l4_uv = 0.0;
  double v8 = 0.0;
  double uy2 = 0.0;                // ||u_y||_2
  double uyvy2 = 0.0;              // ||(u_y, v_y)||_2
  double p2 = 0.0;
  double p4 = 0.0;
  double gradp2 = 0.0;             // ||grad p||_2
  double p2_riesz = 0.0;           // 2 || u^2 + v^2 ||_2 + ||theta||_2 / k_min
  double gradp2_riesz = 0.0;       // 2 ||v u_y||_2 + 2 ||v v_y||_2 + ||theta||_2
  double gradp2_int = 0.0;         // int_0^t ||grad p||_2^2
  double uyvy2_int = 0.0;          // int_0^t ||(u_y, v_y)||_2^2
  std::vector<double> theta_norms; // ||theta||_q, q in the q-grid, then q = inf
  double theta_l2_resid = 0.0;     // ||theta||_2^2 - ||theta0||_2^2 + 2 kappa int ||theta_y||^2
  double theta_l4_resid = 0.0;     // same identity for q = 4
  double Y = 0.0;                  // ||w||_{H1}^2 + ||theta||_{H2}^2 + ||w^2 + |grad theta|^2||_2^2
  double vinf = 0.0;
  double vH2 = 0.0;
  double interp_factor = 0.0;      // sup_ratio * sqrt(log(e + ||v||_H2) log log(e + ||v||_H2))
  double energy_lhs = 0.0;         // ||(u, v)||_2^2 + 2 nu int ||(u_y, v_y)||_2^2
  double energy_rhs = 0.0;         // (||(u0, v0)||_2 + (t - t0) ||theta0||_2)^2
  double energy_gap = 0.0;         // rhs - lhs
  double div_resid = 0.0;          // max |u_x + v_y|
  double div_scale = 0.0;          // ||u||_H1 + ||v||_H1
};

/// log(e + x) log log(e + x).
inline double loglog_factor(double x) {
  const double l = std::log(std::numbers::e + x);
  return l * std::log(l);
}

/// max over r of ||f||_{2r} / sqrt(r log r), given the norms on the r-grid.
inline double ratio_max(const std::vector<double>& norms_2r, const std::vector<double>& r_grid) {
  double m = 0.0;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    m = std::max(m, norms_2r[i] / std::sqrt(r_grid[i] * std::log(r_grid[i])));
  }
  return m;
}

inline DiagnosticsRecord record(const State& s, const Accumulators& acc, std::size_t step = 0,
                                const Grids& grids = {}, bool dealias = true) {
  s.validate();
  const Grid& g = s.grid();
  auto sq = [](double x) { return x * x; };
  DiagnosticsRecord r;
  r.step = step;
  r.t = s.t;

  for (double q : grids.q) r.lq_v.push_back(lq_norm(s.v, q));
  for (double rr : grids.r) r.v_2r.push_back(lq_norm(s.v, 2.0 * rr));
  r.sup_ratio = ratio_max(r.v_2r, grids.r);
  if (acc.v0_2r.size() == grids.r.size()) {
    double b = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grids.r.size(); ++i) {
      const double rr = grids.r[i];
      b = std::max(b, (r.v_2r[i] - acc.v0_2r[i]) / std::sqrt(rr * std::log(rr)));
    }
    r.growth_B = b;
  }

  r.l2_uv = lq_norm(s.u, s.v, 2.0);
  r.l4_uv = lq_norm(s.u, s.v, 4.0);
  r.v8 = lq_norm(s.v, 8.0);

  const auto U = spectral::to_spectral(s.u);
  const auto V = spectral::to_spectral(s.v);
  const auto T = spectral::to_spectral(s.theta);
  const auto Uy = spectral::derivative(U, Axis::y, 1);
  const auto Vy = spectral::derivative(V, Axis::y, 1);
  r.uy2 = spectral::parseval_l2(Uy);
  r.uyvy2 = std::sqrt(sq(r.uy2) + sq(spectral::parseval_l2(Vy)));

  const auto P = spectral::poisson_solve(solver::pressure_rhs(s, dealias));
  const Field p = spectral::to_physical(P);
  r.p2 = lq_norm(p, 2.0);
  r.p4 = lq_norm(p, 4.0);
  r.gradp2 = sobolev_norm(P, 1.0, true);
  const double th2 = lq_norm(s.theta, 2.0);
  const double kmin = g.kmin();
  r.p2_riesz = 2.0 * lq_norm(s.u * s.u + s.v * s.v, 2.0) + th2 / kmin;
  const Field uy = spectral::to_physical(Uy);
  const Field vy = spectral::to_physical(Vy);
  r.gradp2_riesz = 2.0 * lq_norm(s.v * uy, 2.0) + 2.0 * lq_norm(s.v * vy, 2.0) + th2;
  r.gradp2_int = acc.gradp2_int;
  r.uyvy2_int = acc.uyvy2_int;

  for (double q : grids.q) r.theta_norms.push_back(lq_norm(s.theta, q));
  r.theta_norms.push_back(sup_norm(T));
  const double kappa = s.params.kappa;
  r.theta_l2_resid = padded_power(T, 2.0) - acc.theta0_pow2 + 2.0 * kappa * acc.theta_diss2_int;
  r.theta_l4_resid = padded_power(T, 4.0) - acc.theta0_pow4 + 12.0 * kappa * acc.theta_diss4_int;

  // Vorticity w = v_x - u_y.
  auto W = spectral::derivative(V, Axis::x, 1);
  W -= Uy;
  const Field w = spectral::to_physical(W);
  const Field tx = spectral::to_physical(spectral::derivative(T, Axis::x, 1));
  const Field ty = spectral::to_physical(spectral::derivative(T, Axis::y, 1));
  Field mix = w * w;
  mix += tx * tx;
  mix += ty * ty;
  r.Y = sq(sobolev_norm(W, 1.0)) + sq(sobolev_norm(T, 2.0)) + sq(lq_norm(mix, 2.0));

  r.vinf = sup_norm(V);
  r.vH2 = sobolev_norm(V, 2.0);
  r.interp_factor = r.sup_ratio * std::sqrt(loglog_factor(r.vH2));

  r.energy_lhs = sq(r.l2_uv) + 2.0 * s.params.nu * acc.uyvy2_int;
  r.energy_rhs = sq(acc.uv0_l2 + (s.t - acc.t0) * acc.theta0_l2);
  r.energy_gap = r.energy_rhs - r.energy_lhs;

  r.div_resid = spectral::to_physical(spectral::divergence(U, V)).grid_max_abs();
  r.div_scale = sobolev_norm(U, 1.0) + sobolev_norm(V, 1.0);
  return r;
}

/// CSV column names in output order, with one-line descriptions.
struct Column {
  std::string name;
  std::string description;
};

inline std::string format_exponent(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", q);
  return buf;
}

inline std::vector<Column> csv_columns(const Grids& grids = {}) {
  std::vector<Column> c{{"step", "global solver step index"}, {"t", "time"}};
  for (double q : grids.q) {
    c.push_back({"v_L" + format_exponent(q), "||v||_q, q = " + format_exponent(q)});
  }
  for (double r : grids.r) {
    c.push_back({"v_2r" + format_exponent(r), "||v||_{2r}, r = " + format_exponent(r)});
  }
  const std::vector<Column> rest{
      {"sup_ratio", "max over r-grid of ||v||_{2r} / sqrt(r log r)"},
      {"growth_B", "max over r-grid of (||v||_{2r} - ||v0||_{2r}) / sqrt(r log r)"},
      {"l2_uv", "||(u, v)||_2"},
      {"l4_uv", "||(u, v)||_4"},
      {"v8", "||v||_8"},
      {"uy2", "||u_y||_2"},
      {"uyvy2", "||(u_y, v_y)||_2"},
      {"p2", "||p||_2"},
      {"p4", "||p||_4"},
      {"gradp2", "||grad p||_2"},
      {"p2_riesz", "Riesz-transform bound on ||p||_2"},
      {"gradp2_riesz", "Riesz-transform bound on ||grad p||_2"},
      {"gradp2_int", "running time integral of ||grad p||_2^2"},
      {"uyvy2_int", "running time integral of ||(u_y, v_y)||_2^2"},
  };
  c.insert(c.end(), rest.begin(), rest.end());
  for (double q : grids.q) {
    c.push_back({"theta_L" + format_exponent(q), "||theta||_q, q = " + format_exponent(q)});
  }
  const std::vector<Column> tail{
      {"theta_Linf", "||theta||_inf"},
      {"theta_l2_resid", "||theta||_2^2 - ||theta0||_2^2 + 2 kappa int ||theta_y||_2^2"},
      {"theta_l4_resid", "||theta||_4^4 - ||theta0||_4^4 + 12 kappa int theta^2 theta_y^2"},
      {"Y", "||w||_H1^2 + ||theta||_H2^2 + ||w^2 + |grad theta|^2||_2^2, w = v_x - u_y"},
      {"vinf", "||v||_inf"},
      {"vH2", "||v||_H2"},
      {"interp_factor", "sup_ratio * sqrt(log(e + ||v||_H2) log log(e + ||v||_H2))"},
      {"energy_lhs", "||(u, v)||_2^2 + 2 nu int ||(u_y, v_y)||_2^2"},
      {"energy_rhs", "(||(u0, v0)||_2 + (t - t0) ||theta0||_2)^2"},
      {"energy_gap", "energy_rhs - energy_lhs"},
      {"div_resid", "max |u_x + v_y|"},
      {"div_scale", "||u||_H1 + ||v||_H1"},
  };
  c.insert(c.end(), tail.begin(), tail.end());
  return c;
}

inline std::vector<double> csv_values(const DiagnosticsRecord& r) {
  std::vector<double> v{static_cast<double>(r.step), r.t};
  v.insert(v.end(), r.lq_v.begin(), r.lq_v.end());
  v.insert(v.end(), r.v_2r.begin(), r.v_2r.end());
  for (double x : {r.sup_ratio, r.growth_B, r.l2_uv, r.l4_uv, r.v8, r.uy2, r.uyvy2, r.p2, r.p4,
                   r.gradp2, r.p2_riesz, r.gradp2_riesz, r.gradp2_int, r.uyvy2_int}) {
    v.push_back(x);
  }
  v.insert(v.end(), r.theta_norms.begin(), r.theta_norms.end());
  for (double x : {r.theta_l2_resid, r.theta_l4_resid, r.Y, r.vinf, r.vH2, r.interp_factor,
                   r.energy_lhs, r.energy_rhs, r.energy_gap, r.div_resid, r.div_scale}) {
    v.push_back(x);
  }
  return v;
}

/// Shortest text that reads back to the same double.
inline std::string format_value(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string csv_header(const Grids& grids = {}) {
  std::string out;
  for (const auto& c : csv_columns(grids)) {
    if (!out.empty()) out += ',';
    out += c.name;
  }
  return out;
}

inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string out;
  for (double x : csv_values(r)) {
    if (!out.empty()) out += ',';
    out += format_value(x);
  }
  return out;
}

/// Column manifest: one "index,name,description" line per column.
inline std::string csv_manifest(const Grids& grids = {}) {
  std::ostringstream out;
  out << "index,name,description\n";
  const auto cols = csv_columns(grids);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << i << ',' << cols[i].name << ",\"" << cols[i].description << "\"\n";
  }
  return out.str();
}

}  // namespace bvd::diag
