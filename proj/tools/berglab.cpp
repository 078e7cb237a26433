#include <iostream>

#include <CLI11.hpp>

#include "berglab/harness/report.hpp"
#include "berglab/harness/runner.hpp"

int main(int argc, char** argv) {
  using berglab::harness::kSubcommands;
  CLI::App app{"Numerical laboratory for weighted Bergman projections", "berglab"};
  app.set_version_flag("--version", berglab::harness::kToolVersion);
  app.require_subcommand(1);

  berglab::harness::RunOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  for (const auto& name : kSubcommands) {
    auto* sub = app.add_subcommand(name, name == "all" ? "full acceptance suite" : name + " probes");
    sub->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const auto* sub = app.get_subcommands().front();
  opts.subcommand = sub->get_name();
  if (sub->count("--out")) opts.out_dir = out_dir;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--threads")) opts.threads = threads;
  return berglab::harness::run(opts, std::cout, std::cerr);
}
