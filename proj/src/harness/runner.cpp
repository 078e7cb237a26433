#include "berglab/harness/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ostream>

#include "berglab/harness/checks.hpp"
#include "berglab/parallel.hpp"

namespace berglab::harness {

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

int resolve_threads(const RunOptions& opts) {
  if (opts.threads) return *opts.threads;
  if (const auto v = env("BERGLAB_THREADS")) {
    try {
      return std::stoi(*v);
    } catch (const std::exception&) {
      throw ConfigError("BERGLAB_THREADS must be an integer, got '" + *v + "'");
    }
  }
  return 0;
}

std::string resolve_out(const RunOptions& opts, const ExperimentConfig& cfg) {
  if (opts.out_dir) return *opts.out_dir;
  if (const auto v = env("BERGLAB_OUT")) return *v;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return "berglab-out";
}

void print(std::ostream& out, const CheckResult& c) {
  out << "[" << to_string(c.verdict) << "] " << c.id << ": " << c.detail;
  if (c.seconds > 0.0) out << " (" << format_number(c.seconds, 3) << " s)";
  out << "\n";
}

}  // namespace

int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), opts.subcommand) == kSubcommands.end()) {
    err << "berglab: unknown subcommand '" << opts.subcommand << "'\n";
    return 2;
  }
  ExperimentConfig cfg;
  std::string out_dir;
  try {
    cfg = load_config(opts.config_path);
    if (opts.seed) {
      cfg.seed = *opts.seed;
      cfg.quadrature.seed = *opts.seed;
    }
    const int threads = resolve_threads(opts);
    if (threads < 0) throw ConfigError("thread count must be nonnegative");
    if (threads > 0) set_thread_count(threads);
    out_dir = resolve_out(opts, cfg);
    cfg.make_domain();
  } catch (const std::exception& e) {
    err << "berglab: " << e.what() << "\n";
    return 2;
  }

  ExperimentReport report;
  report.subcommand = opts.subcommand;
  report.config = cfg.source;
  report.config["seed"] = cfg.seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (opts.subcommand == "all") {
      for (const auto& c : acceptance_criteria()) {
        report.checks.push_back(run_criterion(c, cfg));
        print(out, report.checks.back());
      }
    } else {
      for (auto& c : run_probes(opts.subcommand, cfg)) {
        print(out, c);
        report.checks.push_back(std::move(c));
      }
    }
  } catch (const ConfigError& e) {
    err << "berglab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    CheckResult c;
    c.id = opts.subcommand;
    c.title = "probe error";
    c.verdict = Verdict::Fail;
    c.detail = std::string("error: ") + e.what();
    print(out, c);
    report.checks.push_back(std::move(c));
  }
  report.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  try {
    emit_report(report, out_dir);
  } catch (const std::exception& e) {
    err << "berglab: " << e.what() << "\n";
    return 2;
  }
  const Verdict v = report.overall();
  out << "overall: " << to_string(v) << " (report in " << out_dir << ")\n";
  return exit_code(v);
}

}  // namespace berglab::harness
