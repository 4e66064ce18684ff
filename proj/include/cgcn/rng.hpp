#pragma once

#include <cstdint>
#include <random>

namespace cgcn {

using Rng = std::mt19937_64;

// Named sub-streams derived from the single run seed.
enum class SeedStream : std::uint64_t {
  kPartition = 1,
  kInit = 2,
  kDropout = 3,
  kSchedule = 4,
  kSampling = 5,
};

std::uint64_t splitmix64(std::uint64_t x);

// Fixed splitting rule: splitmix64 over (seed, stream) then mixed with the
// optional indices, so every component draws from an independent stream.
std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

// Uniform double in [0, 1) using the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; identical across standard libraries.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace cgcn
