#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace clsm {

// std::mt19937_64 output is fixed by the standard; the distributions are not,
// so all draws go through the helpers below to stay reproducible across
// standard library implementations.
using Rng = std::mt19937_64;

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view s);

/// Stable sub-seed for a named purpose.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose,
                          std::uint64_t index);

/// Uniform double in [0, 1).
double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);

/// Uniform integer in [0, n); n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

/// `count` distinct draws from [0, n), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t count,
                                                    Rng& rng);

}  // namespace clsm
