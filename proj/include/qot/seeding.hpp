#pragma once

#include <cstdint>

namespace qot {

/// SplitMix64 finalizer; decorrelates sequential seeds before they reach mt19937_64.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of trial `index` within an experiment; independent of scheduling.
constexpr std::uint64_t trial_seed(std::uint64_t experiment_seed, std::uint64_t index) {
  return splitmix64(splitmix64(experiment_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace qot
