#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace berglab {

/// Worker count used by parallel_for. Defaults to BERGLAB_THREADS or the hardware count.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Results must be written to per-index slots;
/// callers reduce afterwards in index order so output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Independent generator for (seed, stream, index). Substreams are what make
/// sampled results independent of the thread count.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

inline double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace berglab
