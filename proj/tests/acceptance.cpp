#include <cstdio>
#include <cstdlib>
#include <set>

#include "berglab/harness/checks.hpp"

using namespace berglab::harness;

// With arguments, only the listed criterion numbers run.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  ExperimentConfig cfg = parse_config({{"seed", 1}});
  const char* out = std::getenv("BERGLAB_OUT");
  ExperimentReport report;
  report.subcommand = "acceptance";
  report.config = cfg.source;
  int blocking = 0;
  for (const auto& c : acceptance_criteria()) {
    if (!only.empty() && !only.count(c.number)) continue;
    CheckResult r = run_criterion(c, cfg);
    const bool pass = r.verdict == Verdict::Pass;
    const bool excused = !pass && known_unattainable(c.number);
    std::printf("criterion %2d %-4s %s: %s (%.1f s)%s\n", c.number, pass ? "PASS" : "FAIL", c.id.c_str(), r.detail.c_str(),
                r.seconds, excused ? " [known unattainable, see README]" : "");
    std::fflush(stdout);
    if (!pass && !excused) ++blocking;
    report.wall_clock += r.seconds;
    report.checks.push_back(std::move(r));
  }
  if (out != nullptr) emit_report(report, out);
  std::printf("%d blocking failure(s)\n", blocking);
  return blocking == 0 ? 0 : 1;
}
