#pragma once

#include <cstdint>
#include <random>

namespace cic {

// Counter-style stream derivation: work item i of a run with a given seed gets
// the same generator no matter which thread picks it up or in what order.
// Domains keep simulation draws, bootstrap replicates, and oracle chunks from
// ever sharing a stream.
enum class rng_domain : std::uint64_t { dgp = 1, bootstrap = 2, oracle = 3 };

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, rng_domain domain, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed + 0x632BE59BD9B4E019ULL);
  h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(domain)));
  h = splitmix64(h ^ splitmix64(index));
  return std::mt19937_64(h);
}

}  // namespace cic
