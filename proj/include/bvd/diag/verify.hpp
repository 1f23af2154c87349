#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bvd/diag/ensembles.hpp"
#include "bvd/diag/lemmas.hpp"
#include "bvd/lp/analysis.hpp"

namespace bvd::diag {

/// Selectable trial families.
inline const std::vector<std::string> known_lemmas{"interpolation", "triple_product", "low_high",
                                                   "bernstein"};

struct BernsteinCase {
  double p, q, alpha;
};

struct VerifyOptions {
  std::vector<std::string> lemmas = known_lemmas;
  std::size_t ensemble = 100;
  std::size_t n = 128;                                       // base grid size (n x n)
  std::vector<double> q_list{2, 4, 8, 16};                   // low/high exponents
  std::vector<double> triple_q{2, 3, 4, 8};
  std::vector<double> R_list{4, 8, 16, 32, 64, 128, 256};
  std::vector<double> s_list{2};
  std::vector<double> r_grid = default_r_grid;
  std::vector<BernsteinCase> bernstein{{2, 2, 0.5}, {2, 4, 0.25}, {1, 2, 0}, {2, std::numeric_limits<double>::infinity(), 1}};
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0: hardware concurrency

  void validate() const {
    if (lemmas.empty()) throw ConfigError("verify: empty lemma selection");
    for (const auto& l : lemmas) {
      if (std::find(known_lemmas.begin(), known_lemmas.end(), l) == known_lemmas.end()) {
        throw ConfigError("verify: unknown lemma '" + l + "'");
      }
    }
    if (ensemble < 1) throw ConfigError("verify: ensemble size must be >= 1");
    if (n < 16 || n % 2 != 0) throw ConfigError("verify: grid size must be even and >= 16");
    if (q_list.empty() || triple_q.empty() || R_list.empty() || s_list.empty() ||
        r_grid.empty() || bernstein.empty()) {
      throw ConfigError("verify: sweeps must be nonempty");
    }
  }

  bool selected(const std::string& l) const {
    return std::find(lemmas.begin(), lemmas.end(), l) != lemmas.end();
  }
};

/// Invariant with a pass/fail outcome; failing any of these fails a verify run.
struct HardCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass() const { return std::isfinite(value) && value <= tolerance; }
};

/// Ensemble statistics of empirical_C for one lemma and parameter set.
struct Summary {
  std::string key;
  std::size_t counted = 0;
  std::size_t excluded = 0;
  double max_C = 0.0;
  double p95_C = 0.0;
  bool finite = true;
};

struct VerifyResult {
  std::vector<LemmaTrial> trials;
  std::vector<HardCheck> hard;

  bool hard_ok() const {
    return std::all_of(hard.begin(), hard.end(), [](const HardCheck& h) { return h.pass(); });
  }
};

/// Group key: lemma id plus its parameters.
inline std::string summary_key(const LemmaTrial& t) {
  std::string k = t.lemma;
  for (const auto& [name, v] : t.params) k += " " + name + "=" + format_value(v);
  return k;
}

inline std::vector<Summary> summarize(const std::vector<LemmaTrial>& trials) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::size_t> excluded;
  for (const auto& t : trials) {
    const std::string k = summary_key(t);
    if (!values.count(k) && !excluded.count(k)) order.push_back(k);
    if (t.counted()) {
      values[k].push_back(t.empirical_C);
    } else {
      ++excluded[k];
    }
  }
  std::vector<Summary> out;
  for (const auto& k : order) {
    Summary s;
    s.key = k;
    auto v = values[k];
    s.counted = v.size();
    s.excluded = excluded[k];
    if (!v.empty()) {
      std::sort(v.begin(), v.end());
      s.max_C = v.back();
      const std::size_t idx =
          static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size()))) - 1;
      s.p95_C = v[std::min(idx, v.size() - 1)];
      s.finite = std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    }
    out.push_back(s);
  }
  return out;
}

namespace detail {

inline std::uint64_t stream_id(const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) h = (h ^ c) * 1099511628211ull;
  return h;
}

inline std::size_t pow2_at_least(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x) n *= 2;
  return n;
}

inline void append(std::vector<LemmaTrial>& out, std::vector<std::vector<LemmaTrial>> parts) {
  for (auto& p : parts) {
    for (auto& t : p) out.push_back(std::move(t));
  }
}

/// Reconstruction, projection and Poisson identities on random fields.
inline std::vector<HardCheck> hard_invariants(const VerifyOptions& o) {
  const Grid g(o.n, o.n);
  const std::size_t m = std::min<std::size_t>(o.ensemble, 20);
  struct Worst {
    double recon_h = 0, recon_i = 0, leray = 0, poisson = 0, split = 0;
  };
  const auto w = parallel_map(m, o.workers, [&](std::size_t i) {
    auto rng = spectral::make_rng(o.seed, {stream_id("hard"), i});
    BandShape b;
    b.k_lo = 0.0;
    b.k_hi = uniform(rng, 2.0, axis_kmax(g));
    b.slope = uniform(rng, -2.0, 0.0);
    b.coherent = i % 2 == 0;
    const Field f = band_field(g, rng, b);
    const double fmax = f.grid_max_abs();
    Worst r;
    r.recon_h = max_abs_diff(lp::decompose(f, lp::Flavor::homogeneous).reconstruct(), f) / fmax;
    r.recon_i = max_abs_diff(lp::decompose(f, lp::Flavor::inhomogeneous).reconstruct(), f) / fmax;
    const Field u = spectral::random_samples(g, rng), v = spectral::random_samples(g, rng);
    const auto [pu, pv] = spectral::leray_project(u, v);
    const auto [qu, qv] = spectral::leray_project(pu, pv);
    r.leray = std::max(max_abs_diff(pu, qu), max_abs_diff(pv, qv)) /
              std::max(u.grid_max_abs(), v.grid_max_abs());
    Field rhs = f;
    for (double& x : rhs.values()) x -= f.mean();
    const Field phi = spectral::poisson_solve(rhs).phi;
    r.poisson = max_abs_diff(spectral::laplacian(phi), rhs) / rhs.grid_max_abs();
    const auto [lo, hi] = lp::split_low_high(f, uniform(rng, 1.0, axis_kmax(g)));
    Field sum = lo;
    sum += hi;
    r.split = max_abs_diff(sum, f) / fmax;
    return r;
  });
  Worst worst;
  for (const auto& r : w) {
    worst.recon_h = std::max(worst.recon_h, r.recon_h);
    worst.recon_i = std::max(worst.recon_i, r.recon_i);
    worst.leray = std::max(worst.leray, r.leray);
    worst.poisson = std::max(worst.poisson, r.poisson);
    worst.split = std::max(worst.split, r.split);
  }
  return {{"reconstruction_homogeneous", worst.recon_h, 1e-10},
          {"reconstruction_inhomogeneous", worst.recon_i, 1e-10},
          {"leray_idempotence", worst.leray, 1e-12},
          {"poisson_identity", worst.poisson, 1e-10},
          {"split_complement", worst.split, 1e-12}};
}

/// Field drawn for the sup-norm interpolation ensemble, scaled so that its
/// H^s norm is 10^u with u uniform in [0.5, 3].
inline std::pair<Field, std::string> interpolation_field(const Grid& g, Rng& rng, double s,
                                                         std::size_t i) {
  BandShape b;
  b.k_lo = 0.0;
  b.k_hi = std::exp2(uniform(rng, 1.0, std::log2(axis_kmax(g) / 1.5)));
  b.slope = uniform(rng, -2.5, 0.0);
  b.coherent = i % 2 == 0;
  Field f = band_field(g, rng, b);
  const double target = std::pow(10.0, uniform(rng, 0.5, 3.0));
  f *= target / sobolev_norm(f, s);
  return {std::move(f), b.describe()};
}

}  // namespace detail

/// Largest power of two strictly below the Nyquist index of an n-point axis.
inline int oscillation_ceiling(std::size_t n) {
  int j = 0;
  while ((std::size_t{1} << (j + 1)) < n / 2) ++j;
  return j;
}

inline std::vector<LemmaTrial> interpolation_trials(const VerifyOptions& o) {
  const Grid g(o.n, o.n);
  std::vector<LemmaTrial> out;
  const int top = oscillation_ceiling(o.n);
  for (double s : o.s_list) {
    // Oscillation sweep cos(n x) and cos(n x) cos(n y), n = 2^j.
    auto sweep = parallel_map(static_cast<std::size_t>(top + 1), o.workers, [&](std::size_t j) {
      const double n = std::ldexp(1.0, static_cast<int>(j));
      const Field a = Field::sample(g, [n](double x, double) { return std::cos(n * x); });
      const Field b =
          Field::sample(g, [n](double x, double y) { return std::cos(n * x) * std::cos(n * y); });
      std::vector<LemmaTrial> v{
          check_interpolation(a, s, o.r_grid, "cos_x_" + format_value(n)),
          check_interpolation(b, s, o.r_grid, "cos_xy_" + format_value(n))};
      for (auto& t : v) t.params.push_back({"sweep", 1.0});
      return v;
    });
    detail::append(out, std::move(sweep));
    // Pure scaling pair.
    {
      auto rng = spectral::make_rng(o.seed, {detail::stream_id("interp_scale")});
      auto [f, d] = detail::interpolation_field(g, rng, s, 0);
      Field f2 = f;
      f2 *= 2.0;
      LemmaTrial a = check_interpolation(f, s, o.r_grid, "scale1_" + d);
      LemmaTrial b = check_interpolation(f2, s, o.r_grid, "scale2_" + d);
      a.params.push_back({"scaling", 1.0});
      b.params.push_back({"scaling", 2.0});
      out.push_back(a);
      out.push_back(b);
    }
    auto ens = parallel_map(o.ensemble, o.workers, [&](std::size_t i) {
      auto rng = spectral::make_rng(o.seed, {detail::stream_id("interp"), i});
      auto [f, d] = detail::interpolation_field(g, rng, s, i);
      return std::vector<LemmaTrial>{check_interpolation(f, s, o.r_grid, d)};
    });
    detail::append(out, std::move(ens));
  }
  return out;
}

inline BumpShape triple_bump(const VerifyOptions& o, std::size_t i, int which) {
  auto rng = spectral::make_rng(o.seed, {detail::stream_id("triple"), i, static_cast<std::uint64_t>(which)});
  const double L = 2.0 * std::numbers::pi;
  return random_bump(rng, L, L);
}

inline std::vector<LemmaTrial> triple_product_trials(const VerifyOptions& o) {
  std::vector<LemmaTrial> out;
  for (std::size_t n : {o.n, 2 * o.n}) {
    const Grid g(n, n);
    auto part = parallel_map(o.ensemble, o.workers, [&](std::size_t i) {
      const BumpShape bf = triple_bump(o, i, 0), bg = triple_bump(o, i, 1), bh = triple_bump(o, i, 2);
      const Field f = bf.sample(g), gg = bg.sample(g), h = bh.sample(g);
      std::vector<LemmaTrial> v;
      for (double q : o.triple_q) {
        LemmaTrial t = check_triple_product(f, gg, h, q, "triple_" + std::to_string(i));
        t.params.push_back({"n", static_cast<double>(n)});
        v.push_back(std::move(t));
      }
      return v;
    });
    detail::append(out, std::move(part));
  }
  // Named q = 3 and q = 2 forms on the first triple.
  {
    const Grid g(o.n, o.n);
    const Field f = triple_bump(o, 0, 0).sample(g), gg = triple_bump(o, 0, 1).sample(g),
                h = triple_bump(o, 0, 2).sample(g);
    LemmaTrial a = triple_product_q3(f, gg, h);
    LemmaTrial b = triple_product_q2(f, gg, h);
    a.lemma = "triple_product_q3";
    b.lemma = "triple_product_q2";
    out.push_back(a);
    out.push_back(b);
  }
  // Probe: g stretched along y (smaller ||g_y|| relative to ||g||) with f, h fixed.
  {
    const Grid g(o.n, o.n);
    const double L = 2.0 * std::numbers::pi, c = L / 2.0;
    const Field f = bump(g, c, c, 0.6, 0.6), h = bump(g, c, c, 0.8, 0.5);
    for (double stretch : {1.0, 1.5, 2.0, 3.0, 4.0, 5.0}) {
      const Field gg = bump(g, c, c, 0.7, 0.55 * stretch);
      for (double q : o.triple_q) {
        LemmaTrial t = check_triple_product(f, gg, h, q, "stretch_" + format_value(stretch));
        t.lemma = "triple_product_probe";
        t.params.push_back({"stretch", stretch});
        out.push_back(std::move(t));
      }
    }
  }
  return out;
}

/// Grid used for the low/high trials at radius R.
inline std::size_t low_high_grid(const VerifyOptions& o, double R) {
  return std::max(o.n, detail::pow2_at_least(4.0 * R));
}

inline std::vector<LemmaTrial> low_high_trials(const VerifyOptions& o) {
  std::vector<LemmaTrial> out;
  for (double R : o.R_list) {
    const std::size_t n = low_high_grid(o, R);
    const Grid g(n, n);
    const double kcap = axis_kmax(g);
    auto part = parallel_map(o.ensemble, o.workers, [&](std::size_t i) {
      auto rng = spectral::make_rng(o.seed, {detail::stream_id("low_high"), i,
                                             static_cast<std::uint64_t>(R * 1024)});
      BandShape b;
      b.coherent = i % 2 == 0;
      b.slope = uniform(rng, -2.0, 0.0);
      if (i % 3 == 0) {
        b.k_lo = 0.0;
        b.k_hi = std::min(kcap, R * std::exp2(uniform(rng, 0.0, 1.0)));
      } else {
        b.k_lo = R * std::exp2(uniform(rng, -1.5, 0.5));
        b.k_hi = std::min(kcap, b.k_lo * std::exp2(uniform(rng, 0.5, 2.0)));
      }
      Field f = band_field(g, rng, b);
      const double h1 = sobolev_norm(f, 1.0);
      if (h1 > 0.0) f *= 1.0 / h1;
      auto v = check_low_high_sweep(f, R, o.q_list, b.describe());
      return v;
    });
    detail::append(out, std::move(part));
  }
  return out;
}

inline std::vector<LemmaTrial> bernstein_trials(const VerifyOptions& o) {
  const Grid g(o.n, o.n);
  const lp::ShellSystem shells(g);
  std::vector<LemmaTrial> out;
  for (int j = 2; j <= shells.j_max() - 2; ++j) {
    auto part = parallel_map(o.ensemble, o.workers, [&](std::size_t i) {
      auto rng = spectral::make_rng(o.seed, {detail::stream_id("bernstein"), i,
                                             static_cast<std::uint64_t>(j)});
      BandShape b;
      b.k_lo = std::ldexp(1.0, j - 1);
      b.k_hi = std::min(axis_kmax(g), std::ldexp(1.0, j + 1));
      b.slope = uniform(rng, -1.0, 1.0);
      b.coherent = i % 2 == 0;
      const Field f = band_field(g, rng, b);
      std::vector<LemmaTrial> v;
      for (const auto& c : o.bernstein) {
        LemmaTrial t;
        t.lemma = "bernstein";
        t.params = {{"j", static_cast<double>(j)}, {"p", c.p}, {"q", c.q}, {"alpha", c.alpha}};
        t.field = b.describe();
        t.empirical_C = lp::bernstein_ratio(f, j, c.p, c.q, c.alpha);
        t.lhs = t.empirical_C;
        t.rhs_factor = 1.0;
        v.push_back(std::move(t));
      }
      return v;
    });
    detail::append(out, std::move(part));
  }
  return out;
}

inline VerifyResult run_verify(const VerifyOptions& o) {
  o.validate();
  VerifyResult r;
  r.hard = detail::hard_invariants(o);
  auto add = [&](std::vector<LemmaTrial> v) {
    for (auto& t : v) r.trials.push_back(std::move(t));
  };
  if (o.selected("interpolation")) add(interpolation_trials(o));
  if (o.selected("triple_product")) add(triple_product_trials(o));
  if (o.selected("low_high")) add(low_high_trials(o));
  if (o.selected("bernstein")) add(bernstein_trials(o));
  return r;
}

}  // namespace bvd::diag
