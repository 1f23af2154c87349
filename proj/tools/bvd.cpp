#include <string>

#include "CLI11.hpp"
#include "bvd/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boussinesq flow with vertical dissipation: simulation and estimate checks"};
  app.require_subcommand(1);

  std::string run_config, verify_config, report_dir;
  auto* run = app.add_subcommand("run", "integrate a configured initial state and record diagnostics");
  run->add_option("config", run_config, "run configuration file")->required();
  auto* verify = app.add_subcommand("verify", "sample the functional inequalities on random ensembles");
  verify->add_option("config", verify_config, "verify configuration file")->required();
  auto* report = app.add_subcommand("report", "summarize the diagnostics of a finished run");
  report->add_option("dir", report_dir, "run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bvd::cli::exit_config;
  }
  if (*run) return bvd::cli::cmd_run(run_config);
  if (*verify) return bvd::cli::cmd_verify(verify_config);
  return bvd::cli::cmd_report(report_dir);
}
