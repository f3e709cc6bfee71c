#pragma once

#include <cstdint>
#include <random>

namespace coorddet::rng {

// splitmix64 finalizer; cheap avalanche for key-derived seeding.
constexpr std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream tags keep independent uses of one user-facing seed from colliding.
enum class Stream : std::uint64_t {
  kProbes = 1,
  kNonCoordinated,
  kNoise,
  kPsi,
  kAscent,
  kTrial,
};

// Deterministic substream engine keyed by (seed, tag, a, b). Work items
// seeded this way draw identical values whether traversed serially or in
// parallel, which is what makes generation and Monte-Carlo loops
// reproducible independent of scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, Stream tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ static_cast<std::uint64_t>(tag));
  h = mix(h ^ a);
  h = mix(h ^ b);
  return std::mt19937_64(h);
}

}  // namespace coorddet::rng
