#pragma once

#include <cstdint>
#include <random>

namespace polpath {

/// SplitMix64 finalizer; used to turn (seed, stream) keys into engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent engine for stream `stream` of master seed `seed`. The result
/// depends only on the key, so streams can be consumed in any order.
inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace polpath
