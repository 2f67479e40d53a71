#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace tripboost {

/// Reproducible random source.
///
/// The engine is `std::mt19937_64`, whose output sequence is fixed by the
/// C++ standard. Standard distributions are implementation-defined, so all
/// transforms below are written out explicitly. Independent substreams are
/// seeded from (seed, key...) through SplitMix64 mixing.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/splitmix64-substreams/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Substream keyed by an ordered list of integers.
  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer on [0, n); n > 0. Unbiased (rejection sampling).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// `k` distinct values from [0, n) in ascending order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the substream keyed by (seed, keys...); what Rng::substream uses.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

}  // namespace tripboost
