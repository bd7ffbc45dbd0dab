#pragma once

#include <cstdint>
#include <random>

namespace wustat {

// Every random draw in the toolkit comes from an engine whose seed is a
// stream id derived from (parent seed, index, role). Streams with different
// ids never share state, so replicates and coupled copies stay reproducible
// regardless of scheduling.
enum class StreamRole : std::uint64_t {
  history = 1,         // innovations at indices <= 0 (pre-history, burn-in)
  future = 2,          // innovations at indices >= 1
  shadow_history = 3,  // independent pre-history of a coupled copy
  path = 4,            // per-path seed inside an experiment
  center = 5,          // Monte Carlo centering replicates
  pilot = 6,           // pilot samples (grids, calibration)
  inner = 7,           // inner loops of nested estimators
};

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index,
                            StreamRole role) noexcept;

inline std::uint64_t derive_stream(std::uint64_t seed, StreamRole role) noexcept {
  return derive_stream(seed, 0, role);
}

inline Engine make_engine(std::uint64_t stream_id) { return Engine(stream_id); }

}  // namespace wustat
