#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bvd/diag/record.hpp"
#include "bvd/solver/checkpoint.hpp"
#include "bvd/solver/run.hpp"

namespace bvd::diag {

/// Collects DiagnosticsRecords along a run. The accumulators advance on every
/// solver step; records are taken at the run's sample points.
class Recorder {
 public:
  Recorder(const State& initial, Grids grids = {}, bool dealias = true)
      : grids_(std::move(grids)), dealias_(dealias) {
    grids_.validate();
    acc_ = Accumulators::start(initial, grids_, dealias_);
  }

  /// Resume with accumulators saved from an earlier run.
  Recorder(Accumulators acc, Grids grids = {}, bool dealias = true)
      : grids_(std::move(grids)), dealias_(dealias), acc_(std::move(acc)) {
    grids_.validate();
  }

  /// Hooks for solver::run; `on_record` is called for each new record.
  solver::RunHooks hooks(std::size_t cadence,
                         std::function<void(const DiagnosticsRecord&)> on_record = {}) {
    solver::RunHooks h;
    h.cadence = cadence;
    h.on_step = [this](const State& before, const State& after, std::size_t) {
      acc_.advance(before, after, dealias_);
    };
    h.on_sample = [this, on_record](const State& s, std::size_t k) {
      records_.push_back(record(s, acc_, k, grids_, dealias_));
      if (on_record) on_record(records_.back());
    };
    return h;
  }

  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  const Accumulators& accumulators() const { return acc_; }
  const Grids& grids() const { return grids_; }

 private:
  Grids grids_;
  bool dealias_;
  Accumulators acc_;
  std::vector<DiagnosticsRecord> records_;
};

/// Text form of the accumulators, exact under round trip. Stored next to a
/// checkpoint so a restarted run continues its diagnostics unchanged.
inline std::string encode_accumulators(const Accumulators& a, std::size_t step) {
  std::ostringstream out;
  out << "step " << step << '\n';
  auto put = [&](const char* key, double x) { out << key << ' ' << format_value(x) << '\n'; };
  put("t0", a.t0);
  put("uv0_l2", a.uv0_l2);
  put("theta0_l2", a.theta0_l2);
  put("theta0_pow2", a.theta0_pow2);
  put("theta0_pow4", a.theta0_pow4);
  put("gradp2_int", a.gradp2_int);
  put("uyvy2_int", a.uyvy2_int);
  put("theta_diss2_int", a.theta_diss2_int);
  put("theta_diss4_int", a.theta_diss4_int);
  put("last_gradp2", a.last.gradp2);
  put("last_uyvy2", a.last.uyvy2);
  put("last_theta_diss2", a.last.theta_diss2);
  put("last_theta_diss4", a.last.theta_diss4);
  out << "v0_2r";
  for (double x : a.v0_2r) out << ' ' << format_value(x);
  out << '\n';
  return out.str();
}

struct SavedAccumulators {
  Accumulators acc;
  std::size_t step = 0;
};

inline SavedAccumulators decode_accumulators(const std::string& text) {
  std::istringstream in(text);
  std::map<std::string, std::vector<double>> kv;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<double>& vals = kv[key];
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      const double x = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') throw IoError("accumulators: bad value for " + key);
      vals.push_back(x);
    }
  }
  auto one = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.size() != 1) {
      throw IoError(std::string("accumulators: missing ") + key);
    }
    return it->second[0];
  };
  SavedAccumulators s;
  s.step = static_cast<std::size_t>(one("step"));
  Accumulators& a = s.acc;
  a.t0 = one("t0");
  a.uv0_l2 = one("uv0_l2");
  a.theta0_l2 = one("theta0_l2");
  a.theta0_pow2 = one("theta0_pow2");
  a.theta0_pow4 = one("theta0_pow4");
  a.gradp2_int = one("gradp2_int");
  a.uyvy2_int = one("uyvy2_int");
  a.theta_diss2_int = one("theta_diss2_int");
  a.theta_diss4_int = one("theta_diss4_int");
  a.last.gradp2 = one("last_gradp2");
  a.last.uyvy2 = one("last_uyvy2");
  a.last.theta_diss2 = one("last_theta_diss2");
  a.last.theta_diss4 = one("last_theta_diss4");
  a.v0_2r = kv["v0_2r"];
  return s;
}

/// Per-sample growth functional B(t) and its running envelope.
struct GrowthReport {
  std::vector<double> t;
  std::vector<double> B;         // max_r (||v||_{2r} - ||v0||_{2r}) / sqrt(r log r)
  std::vector<double> envelope;  // running max of B
  double B_max = 0.0;
  bool finite = true;
  std::size_t envelope_violations = 0;     // r entries above the envelope by > 1e-6
  std::size_t accumulator_decreases = 0;   // drops in gradp2_int or uyvy2_int
};

inline GrowthReport check_growth_bound(const std::vector<DiagnosticsRecord>& traj,
                                       const Grids& grids = {}) {
  if (traj.size() < 2) throw InvalidArgument("check_growth_bound: need at least 2 samples");
  GrowthReport rep;
  const auto& v0 = traj.front().v_2r;
  double env = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const auto& rec = traj[n];
    double b = -std::numeric_limits<double>::infinity();
    std::vector<double> per_r;
    for (std::size_t i = 0; i < grids.r.size(); ++i) {
      const double rr = grids.r[i];
      per_r.push_back((rec.v_2r[i] - v0[i]) / std::sqrt(rr * std::log(rr)));
      b = std::max(b, per_r.back());
    }
    env = std::max(env, b);
    for (double x : per_r) {
      if (x > env + 1e-6) ++rep.envelope_violations;
    }
    rep.t.push_back(rec.t);
    rep.B.push_back(b);
    rep.envelope.push_back(env);
    rep.finite = rep.finite && std::isfinite(b);
    if (n > 0) {
      const auto& prev = traj[n - 1];
      if (rec.gradp2_int < prev.gradp2_int || rec.uyvy2_int < prev.uyvy2_int) {
        ++rep.accumulator_decreases;
      }
    }
  }
  rep.B_max = env;
  return rep;
}

/// Y(t), ||v||_inf and the interpolation bound C * interp_factor per sample.
struct YGrowthReport {
  std::vector<double> t;
  std::vector<double> Y;
  std::vector<double> vinf;
  std::vector<double> bound;
  std::size_t violations = 0;
};

inline YGrowthReport check_y_growth(const std::vector<DiagnosticsRecord>& traj, double C_max) {
  YGrowthReport rep;
  for (const auto& rec : traj) {
    rep.t.push_back(rec.t);
    rep.Y.push_back(rec.Y);
    rep.vinf.push_back(rec.vinf);
    rep.bound.push_back(C_max * rec.interp_factor);
    if (rec.vinf > rep.bound.back() * (1.0 + 1e-12)) ++rep.violations;
  }
  return rep;
}

}  // namespace bvd::diag
