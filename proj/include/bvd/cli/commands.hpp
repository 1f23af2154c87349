#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bvd/cli/config.hpp"
#include "bvd/diag/trajectory.hpp"
#include "bvd/diag/verify.hpp"
#include "bvd/solver/checkpoint.hpp"
#include "bvd/solver/presets.hpp"
#include "bvd/solver/run.hpp"

namespace bvd::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,  // a hard invariant failed (verify)
  exit_config = 2,
  exit_runtime = 3,       // cfl violation or blow-up
  exit_io = 4,
};

/// Environment variable that overrides output.dir.
inline constexpr const char* output_env = "BVD_OUTPUT_DIR";

inline fs::path output_dir(const std::string& configured) {
  if (const char* env = std::getenv(output_env); env && *env) return env;
  return configured;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------- run

inline const std::vector<std::string> run_presets{"zero", "shear", "buoyant", "random",
                                                  "stratified", "checkpoint"};

struct RunConfig {
  std::size_t nx = 0, ny = 0;
  double lx = 2.0 * std::numbers::pi, ly = 2.0 * std::numbers::pi;
  solver::PhysParams params;
  solver::StepperConfig stepper;
  std::string preset;
  std::string checkpoint;
  solver::RandomInit init;
  double stratification = 1.0;
  double value = 1.0;  // shear amplitude or buoyant temperature
  double t_end = 0.0;
  std::size_t cadence = 10;
  std::size_t snapshot_every = 0;
  diag::Grids grids;
  std::string output = "out";
};

inline RunConfig parse_run_config(KeyValueConfig& kv) {
  RunConfig c;
  c.preset = kv.get_string("init.preset");
  const bool from_checkpoint = c.preset == "checkpoint";
  if (!c.preset.empty() &&
      std::find(run_presets.begin(), run_presets.end(), c.preset) == run_presets.end()) {
    kv.invalid("init.preset", "unknown preset '" + c.preset + "'");
  }
  if (from_checkpoint) {
    c.checkpoint = kv.get_string("init.checkpoint");
  } else {
    kv.raw("init.checkpoint");
  }

  // Grid and physical parameters come from the checkpoint when restarting.
  const std::optional<std::uint64_t> no_size =
      from_checkpoint ? std::optional<std::uint64_t>(0) : std::nullopt;
  c.nx = kv.get_uint("grid.nx", no_size);
  c.ny = kv.get_uint("grid.ny", no_size);
  c.lx = kv.get_double("grid.lx", c.lx);
  c.ly = kv.get_double("grid.ly", c.ly);
  const std::optional<double> no_param = from_checkpoint ? std::optional<double>(-1.0) : std::nullopt;
  c.params.nu = kv.get_double("params.nu", no_param);
  c.params.kappa = kv.get_double("params.kappa", no_param);
  if (!from_checkpoint || kv.has("params.nu")) {
    if (c.params.nu < 0.0) kv.invalid("params.nu", "must be >= 0");
  }
  if (!from_checkpoint || kv.has("params.kappa")) {
    if (c.params.kappa < 0.0) kv.invalid("params.kappa", "must be >= 0");
  }
  if (!from_checkpoint) {
    if (c.nx < 8 || c.nx % 2) kv.invalid("grid.nx", "must be even and >= 8");
    if (c.ny < 8 || c.ny % 2) kv.invalid("grid.ny", "must be even and >= 8");
  }
  if (!(c.lx > 0.0)) kv.invalid("grid.lx", "must be positive");
  if (!(c.ly > 0.0)) kv.invalid("grid.ly", "must be positive");

  c.stepper.dt = kv.get_double("stepper.dt");
  c.stepper.cfl_limit = kv.get_double("stepper.cfl_limit", 0.5);
  c.stepper.dealias = kv.get_bool("stepper.dealias", true);
  if (!(c.stepper.dt > 0.0)) kv.invalid("stepper.dt", "must be positive");
  if (!(c.stepper.cfl_limit > 0.0)) kv.invalid("stepper.cfl_limit", "must be positive");

  c.init.slope = kv.get_double("init.slope", c.init.slope);
  c.init.amplitude = kv.get_double("init.amplitude", c.init.amplitude);
  c.init.theta_amplitude = kv.get_double("init.theta_amplitude", c.init.theta_amplitude);
  c.init.k_hi = kv.get_double("init.k_hi", c.init.k_hi);
  c.init.seed = kv.get_uint("init.seed", c.init.seed);
  c.stratification = kv.get_double("init.stratification", c.stratification);
  c.value = kv.get_double("init.value", c.value);
  if (!(c.init.k_hi > 0.0)) kv.invalid("init.k_hi", "must be positive");
  if (c.init.amplitude < 0.0) kv.invalid("init.amplitude", "must be >= 0");
  if (c.init.theta_amplitude < 0.0) kv.invalid("init.theta_amplitude", "must be >= 0");

  c.t_end = kv.get_double("run.t_end");
  if (!(c.t_end > 0.0)) kv.invalid("run.t_end", "must be positive");
  c.cadence = kv.get_uint("diagnostics.cadence", 10);
  if (c.cadence < 1) kv.invalid("diagnostics.cadence", "must be >= 1");
  c.grids.q = kv.get_list("diagnostics.q_grid", diag::default_q_grid);
  c.grids.r = kv.get_list("diagnostics.r_grid", diag::default_r_grid);
  for (double q : c.grids.q) {
    if (!(q >= 1.0) || std::isinf(q)) kv.invalid("diagnostics.q_grid", "entries must be in [1, inf)");
  }
  for (double r : c.grids.r) {
    if (!(r > 1.0) || std::isinf(r)) kv.invalid("diagnostics.r_grid", "entries must be in (1, inf)");
  }
  c.snapshot_every = kv.get_uint("output.snapshot_every", 0);
  c.output = kv.get_string("output.dir", c.output);
  kv.finish();
  return c;
}

inline solver::State initial_state(const RunConfig& c) {
  const spectral::Grid g(c.nx, c.ny, c.lx, c.ly);
  if (c.preset == "zero") return solver::State::zero(g, c.params);
  if (c.preset == "shear") return solver::shear(g, c.params, c.value);
  if (c.preset == "buoyant") return solver::buoyant_rest(g, c.params, c.value);
  if (c.preset == "random") return solver::random_state(g, c.params, c.init);
  return solver::stratified(g, c.params, c.init, c.stratification);
}

inline std::string failure_record(const StepError& e, std::size_t step) {
  std::string detail = e.detail();
  for (char& ch : detail) {
    if (ch == ' ') ch = '_';
  }
  return "status=failed kind=" + std::string(StepError::kind_name(e.kind())) +
         " t=" + diag::format_value(e.time()) + " step=" + std::to_string(step) +
         " detail=" + detail + "\n";
}

/// Files written by cmd_run.
inline constexpr const char* diagnostics_file = "diagnostics.csv";
inline constexpr const char* columns_file = "columns.csv";
inline constexpr const char* checkpoint_file = "checkpoint.bvd";
inline constexpr const char* sidecar_suffix = ".acc";
inline constexpr const char* status_file = "run.status";
inline constexpr const char* failure_file = "failure.record";

inline int cmd_run(const fs::path& config_path, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  try {
    auto kv = KeyValueConfig::load(config_path);
    const RunConfig c = parse_run_config(kv);

    const bool restart = c.preset == "checkpoint";
    solver::State s0 = restart ? solver::read_checkpoint(c.checkpoint) : initial_state(c);
    std::size_t start_step = 0;
    std::optional<diag::Recorder> rec;
    if (restart) {
      if ((c.params.nu >= 0.0 && c.params.nu != s0.params.nu) ||
          (c.params.kappa >= 0.0 && c.params.kappa != s0.params.kappa)) {
        throw ConfigError("params differ from those stored in the checkpoint");
      }
      if ((c.nx && c.nx != s0.grid().nx()) || (c.ny && c.ny != s0.grid().ny())) {
        throw ConfigError("grid size differs from the checkpoint");
      }
      const fs::path side = c.checkpoint + sidecar_suffix;
      if (fs::exists(side)) {
        auto saved = diag::decode_accumulators(solver::read_file_bytes(side));
        start_step = saved.step;
        rec.emplace(std::move(saved.acc), c.grids, c.stepper.dealias);
      }
    }
    if (!rec) rec.emplace(s0, c.grids, c.stepper.dealias);
    if (!(c.t_end >= s0.t)) throw ConfigError("run.t_end is before the initial time");

    const fs::path out = output_dir(c.output);
    fs::create_directories(out);
    std::ofstream csv(out / diagnostics_file, std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write " + (out / diagnostics_file).string());
    csv << diag::csv_header(c.grids) << '\n';
    write_text(out / columns_file, diag::csv_manifest(c.grids));
    if (c.snapshot_every > 0) fs::create_directories(out / "snapshots");

    solver::RunHooks hooks = rec->hooks(c.cadence, [&](const diag::DiagnosticsRecord& r) {
      csv << diag::csv_row(r) << '\n';
    });
    auto on_step = hooks.on_step;
    hooks.on_step = [&, on_step](const solver::State& a, const solver::State& b, std::size_t k) {
      on_step(a, b, k);
      if (c.snapshot_every > 0 && k % c.snapshot_every == 0) {
        char name[40];
        std::snprintf(name, sizeof name, "snap_%08zu.bvd", k);
        solver::write_checkpoint(out / "snapshots" / name, b);
      }
    };

    const auto res = solver::run(s0, c.stepper, c.t_end, hooks, start_step);
    csv.close();
    if (!csv) throw IoError("write failed: " + (out / diagnostics_file).string());
    solver::write_checkpoint(out / checkpoint_file, res.final);
    write_text(out / (std::string(checkpoint_file) + sidecar_suffix),
               diag::encode_accumulators(rec->accumulators(), res.last_step));

    std::string summary = "steps=" + std::to_string(res.steps_taken()) +
                          " samples=" + std::to_string(res.samples) +
                          " t=" + diag::format_value(res.final.t);
    if (c.preset == "shear") {
      const auto exact = solver::shear_exact(res.final.grid(), res.final.params, res.final.t, c.value);
      summary += " exact_error=" + diag::format_value(max_abs_diff(res.final.u, exact.u));
    }
    if (res.partial()) {
      write_text(out / status_file, "partial\n");
      write_text(out / failure_file, failure_record(*res.failure, res.last_step + 1));
      err << failure_record(*res.failure, res.last_step + 1);
      log << "status=partial " << summary << '\n';
      return exit_runtime;
    }
    write_text(out / status_file, "complete\n");
    std::error_code ec;
    fs::remove(out / failure_file, ec);
    log << "status=complete " << summary << '\n';
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return exit_io;
  } catch (const StepError& e) {
    err << failure_record(e, 0);
    return exit_runtime;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }
}

// ---------------------------------------------------------------- verify

struct VerifyConfig {
  diag::VerifyOptions options;
  std::string output = "verify_out";
};

inline VerifyConfig parse_verify_config(KeyValueConfig& kv) {
  VerifyConfig c;
  auto& o = c.options;
  o.lemmas = kv.get_words("verify.lemmas");
  if (kv.has("verify.lemmas") && o.lemmas.empty()) kv.invalid("verify.lemmas", "empty selection");
  for (const auto& l : o.lemmas) {
    if (std::find(diag::known_lemmas.begin(), diag::known_lemmas.end(), l) == diag::known_lemmas.end()) {
      kv.invalid("verify.lemmas", "unknown lemma '" + l + "'");
    }
  }
  o.ensemble = kv.get_uint("verify.ensemble", o.ensemble);
  if (o.ensemble < 1) kv.invalid("verify.ensemble", "must be >= 1");
  o.n = kv.get_uint("verify.n", o.n);
  if (o.n < 16 || o.n % 2) kv.invalid("verify.n", "must be even and >= 16");
  o.seed = kv.get_uint("verify.seed", o.seed);
  o.workers = kv.get_uint("verify.workers", o.workers);
  o.q_list = kv.get_list("sweep.q", o.q_list);
  for (double q : o.q_list) {
    if (!(q >= 2.0) || std::isinf(q)) kv.invalid("sweep.q", "entries must be in [2, inf)");
  }
  o.triple_q = kv.get_list("sweep.triple_q", o.triple_q);
  for (double q : o.triple_q) {
    if (!(q >= 2.0) || std::isinf(q)) kv.invalid("sweep.triple_q", "entries must be in [2, inf)");
  }
  o.R_list = kv.get_list("sweep.R", o.R_list);
  for (double R : o.R_list) {
    if (!(R >= 4.0) || R > 4096.0) kv.invalid("sweep.R", "entries must be in [4, 4096]");
  }
  o.s_list = kv.get_list("sweep.s", o.s_list);
  for (double s : o.s_list) {
    if (!(s > 1.0) || std::isinf(s)) kv.invalid("sweep.s", "entries must be > 1");
  }
  o.r_grid = kv.get_list("sweep.r", o.r_grid);
  for (double r : o.r_grid) {
    if (!(r > 1.0) || std::isinf(r)) kv.invalid("sweep.r", "entries must be in (1, inf)");
  }
  c.output = kv.get_string("output.dir", c.output);
  kv.finish();
  return c;
}

inline constexpr const char* trials_file = "trials.txt";
inline constexpr const char* summary_file = "summary.csv";
inline constexpr const char* hard_file = "hard_checks.csv";

inline std::string summary_csv(const std::vector<diag::Summary>& s) {
  std::string out = "key,counted,excluded,max_C,p95_C,finite\n";
  for (const auto& x : s) {
    out += x.key + "," + std::to_string(x.counted) + "," + std::to_string(x.excluded) + "," +
           diag::format_value(x.max_C) + "," + diag::format_value(x.p95_C) + "," +
           (x.finite ? "yes" : "no") + "\n";
  }
  return out;
}

inline std::string hard_csv(const std::vector<diag::HardCheck>& h) {
  std::string out = "name,value,tolerance,pass\n";
  for (const auto& x : h) {
    out += x.name + "," + diag::format_value(x.value) + "," + diag::format_value(x.tolerance) +
           "," + (x.pass() ? "yes" : "no") + "\n";
  }
  return out;
}

inline int cmd_verify(const fs::path& config_path, std::ostream& log = std::cout,
                      std::ostream& err = std::cerr) {
  try {
    auto kv = KeyValueConfig::load(config_path);
    const VerifyConfig c = parse_verify_config(kv);
    const auto result = diag::run_verify(c.options);
    const auto summaries = diag::summarize(result.trials);

    const fs::path out = output_dir(c.output);
    fs::create_directories(out);
    std::string lines;
    for (const auto& t : result.trials) lines += diag::to_line(t) + "\n";
    write_text(out / trials_file, lines);
    write_text(out / summary_file, summary_csv(summaries));
    write_text(out / hard_file, hard_csv(result.hard));

    for (const auto& s : summaries) {
      log << s.key << "  n=" << s.counted << "  max_C=" << diag::format_value(s.max_C)
          << "  p95_C=" << diag::format_value(s.p95_C) << '\n';
    }
    for (const auto& h : result.hard) {
      log << "hard " << h.name << " " << diag::format_value(h.value) << " "
          << (h.pass() ? "pass" : "FAIL") << '\n';
    }
    return result.hard_ok() ? exit_ok : exit_check_failed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return exit_io;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }
}

// ---------------------------------------------------------------- report

/// Parsed diagnostics CSV.
struct DiagnosticsTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw IoError("diagnostics CSV lacks column " + name);
  }
  std::vector<double> column(const std::string& name) const {
    const std::size_t i = index(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[i]);
    return out;
  }
};

inline DiagnosticsTable read_diagnostics(const fs::path& dir) {
  const fs::path path = dir / diagnostics_file;
  if (!fs::is_directory(dir) || !fs::exists(path)) throw IoError("no diagnostics found in " + dir.string());
  std::ifstream in(path);
  if (!in) throw IoError("no diagnostics found in " + dir.string());
  DiagnosticsTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw IoError("corrupt diagnostics CSV: missing header");
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) t.columns.push_back(c);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) {
      char* end = nullptr;
      const double x = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') {
        throw IoError("corrupt diagnostics CSV: line " + std::to_string(lineno));
      }
      row.push_back(x);
    }
    if (row.size() != t.columns.size()) {
      throw IoError("corrupt diagnostics CSV: line " + std::to_string(lineno) + " has " +
                    std::to_string(row.size()) + " fields");
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw IoError("no diagnostics found in " + dir.string());
  return t;
}

/// Quantities whose maxima over time are tabulated.
inline const std::vector<std::string> report_maxima{
    "l2_uv", "l4_uv", "v8", "uy2", "uyvy2", "p2", "p4", "gradp2", "gradp2_int", "uyvy2_int",
    "sup_ratio", "vinf", "Y", "theta_Linf"};

inline constexpr double energy_gap_rel_tol = 1e-6;

struct ReportResult {
  std::string text;
  std::string summary_csv;
  std::string series_csv;
  bool energy_gap_nonnegative = true;
  bool gradp2_int_monotone = true;
  double B_max = 0.0;
};

inline ReportResult build_report(const DiagnosticsTable& t) {
  ReportResult r;
  std::ostringstream text, summary, series;
  const auto time = t.column("t");
  text << "samples " << t.rows.size() << ", t from " << diag::format_value(time.front()) << " to "
       << diag::format_value(time.back()) << "\n\n";
  text << "quantity            max over t\n";
  summary << "quantity,max,t_at_max\n";
  for (const auto& name : report_maxima) {
    const auto col = t.column(name);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < col.size(); ++i) {
      if (col[i] > col[arg]) arg = i;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-18s  %.10g (t=%g)\n", name.c_str(), col[arg], time[arg]);
    text << buf;
    summary << name << ',' << diag::format_value(col[arg]) << ',' << diag::format_value(time[arg]) << '\n';
  }

  const auto B = t.column("growth_B");
  const auto Y = t.column("Y");
  const auto gap = t.column("energy_gap");
  const auto gp = t.column("gradp2_int");
  const auto erhs = t.column("energy_rhs");
  series << "t,growth_B,B_envelope,Y,energy_gap,gradp2_int\n";
  double env = -INFINITY, min_gap = INFINITY, min_rel_gap = INFINITY;
  for (std::size_t i = 0; i < time.size(); ++i) {
    env = std::max(env, B[i]);
    min_gap = std::min(min_gap, gap[i]);
    min_rel_gap = std::min(min_rel_gap, gap[i] / std::max(erhs[i], 1e-300));
    if (i > 0 && gp[i] < gp[i - 1]) r.gradp2_int_monotone = false;
    series << diag::format_value(time[i]) << ',' << diag::format_value(B[i]) << ','
           << diag::format_value(env) << ',' << diag::format_value(Y[i]) << ','
           << diag::format_value(gap[i]) << ',' << diag::format_value(gp[i]) << '\n';
  }
  r.B_max = env;
  // The dissipation integral is a trapezoid sum, so an equality case may
  // dip below zero by the quadrature error.
  r.energy_gap_nonnegative = min_gap >= 0.0 || min_rel_gap >= -energy_gap_rel_tol;
  text << "\ngrowth envelope max_t B(t)   " << diag::format_value(env)
       << (std::isfinite(env) ? " (finite)" : " (NOT finite)") << '\n';
  text << "energy gap min                " << diag::format_value(min_gap)
       << (r.energy_gap_nonnegative ? " (nonnegative within quadrature tolerance)" : " (NEGATIVE)") << '\n';
  text << "gradp2_int monotone           " << (r.gradp2_int_monotone ? "yes" : "no") << '\n';
  summary << "B_envelope," << diag::format_value(env) << ",\n";
  summary << "energy_gap_min," << diag::format_value(min_gap) << ",\n";
  r.text = text.str();
  r.summary_csv = summary.str();
  r.series_csv = series.str();
  return r;
}

inline constexpr const char* report_text_file = "report.txt";
inline constexpr const char* report_summary_file = "report_summary.csv";
inline constexpr const char* report_series_file = "report_series.csv";

inline int cmd_report(const fs::path& dir, std::ostream& log = std::cout,
                      std::ostream& err = std::cerr) {
  try {
    const auto table = read_diagnostics(dir);
    const auto rep = build_report(table);
    write_text(dir / report_text_file, rep.text);
    write_text(dir / report_summary_file, rep.summary_csv);
    write_text(dir / report_series_file, rep.series_csv);
    log << rep.text;
    return exit_ok;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_io;
  }
}

}  // namespace bvd::cli
