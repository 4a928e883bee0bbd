#include <CLI11.hpp>

#include "tvopt/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tvopt: time-varying convex optimization with adaptive augmentation"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  tvopt::DriverOptions opt;

  auto add_common = [&](CLI::App* cmd, bool multi) {
    if (multi) {
      cmd->add_option("--config", configs, "run configuration file(s)")
          ->required()
          ->check(CLI::ExistingFile);
    } else {
      configs.clear();
      cmd->add_option("--config", configs, "run configuration file")
          ->required()
          ->expected(1)
          ->check(CLI::ExistingFile);
    }
    cmd->add_flag("--quiet", opt.quiet, "suppress progress output");
  };

  CLI::App* run = app.add_subcommand("run", "simulate and write trace/summary/plots");
  add_common(run, true);
  run->add_option("--out", opt.out_dir, "output directory (overrides config)");
  run->add_flag("--no-plots", opt.no_plots, "skip SVG plot generation");

  CLI::App* certify = app.add_subcommand("certify", "evaluate the a priori certificate");
  add_common(certify, false);

  CLI::App* check = app.add_subcommand("check", "finite-difference derivative check");
  add_common(check, false);

  CLI::App* bench = app.add_subcommand("bench", "per-step timing comparison");
  add_common(bench, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? tvopt::kExitOk : tvopt::kExitError;
  }

  std::vector<std::filesystem::path> paths(configs.begin(), configs.end());
  if (run->parsed()) return tvopt::cmd_run_many(paths, opt);
  if (certify->parsed()) return tvopt::cmd_certify(paths.front(), opt);
  if (check->parsed()) return tvopt::cmd_check(paths.front(), opt);
  if (bench->parsed()) return tvopt::cmd_bench(paths.front(), opt);
  return tvopt::kExitError;
}
