#pragma once

#include <cstdint>

namespace etd {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the independent substream used by replication `replication` of a
/// study seeded with `seed`. Depends only on the pair, never on scheduling.
inline std::uint64_t substream_seed(std::uint64_t seed,
                                    std::uint64_t replication) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~replication));
}

}  // namespace etd
