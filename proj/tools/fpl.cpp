#include <CLI11.hpp>

#include <iostream>

#include "fpl/app/commands.hpp"

int main(int argc, char** argv) {
  using namespace fpl::app;
  CLI::App app{"Conservative spectral solver for the space-homogeneous Fokker-Planck-Landau equation"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  const auto common = [&](CLI::App* sub, bool config) {
    auto* c = sub->add_option("--config", opts.config, "configuration file (INI)");
    if (config) c->required();
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed for initial data");
  };
  auto* precompute = app.add_subcommand("precompute", "build and cache the weight table");
  common(precompute, true);
  auto* run = app.add_subcommand("run", "integrate to t_final, writing diagnostics and snapshots");
  common(run, true);
  auto* verify = app.add_subcommand("verify", "run acceptance suites and print a pass/fail table");
  common(verify, false);
  verify->add_option("--suite", opts.suite, "suite name or 'all'");
  auto* analyze = app.add_subcommand("analyze", "summarize the diagnostics CSV of a run directory");
  common(analyze, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed")) opts.seed = seed;

  if (*precompute) return cmd_precompute(opts, std::cout, std::cerr);
  if (*run) return cmd_run(opts, std::cout, std::cerr);
  if (*verify) return cmd_verify(opts, std::cout, std::cerr);
  return cmd_analyze(opts, std::cout, std::cerr);
}
