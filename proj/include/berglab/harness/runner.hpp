#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace berglab::harness {

inline const std::vector<std::string> kSubcommands{"geometry-check", "kernel-check", "bp",        "operator-norm",
                                                   "good-lambda",    "lemma-suite",  "necessity", "all"};

struct RunOptions {
  std::string subcommand;
  std::string config_path;
  /// Output directory; falls back to $BERGLAB_OUT, then the config "output" key, then ./berglab-out.
  std::optional<std::string> out_dir;
  /// Overrides the config seed.
  std::optional<std::uint64_t> seed;
  /// Worker threads; falls back to $BERGLAB_THREADS, then the hardware count.
  std::optional<int> threads;
};

/// Runs one subcommand and writes its report. Returns 0 pass, 1 fail, 2 config/IO error, 3 flagged only.
/// A config or IO error writes nothing to the output directory.
int run(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace berglab::harness
