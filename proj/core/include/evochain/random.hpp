#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace evochain {

/// All randomness in the library flows through this engine. Distribution
/// helpers below are implemented here rather than taken from <random> so that
/// draws are identical across standard library implementations.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for the `stream`-th independent task under `root`. Tasks derive their
/// own engines from this so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept;

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

/// 64-bit FNV-1a, used for config hashes and schema fingerprints.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string to_hex(std::uint64_t value);

}  // namespace evochain
