#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace klsc {

/// A seeded random stream: a std::mt19937_64 engine plus the distributions
/// drawn from it. Each stream owns its distribution state, so results depend
/// only on the stream seed and call sequence.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Deterministic seed partitioning.
///
/// A master seed is split into one stream per experiment (keyed by name) and
/// each experiment stream into per-work-unit substreams keyed by an integer
/// counter. Every derived seed is
///
///   splitmix64(splitmix64(master ^ fnv1a64(experiment)) + unit)
///
/// and seeds a std::mt19937_64. Any language can reproduce the partitioning
/// from this formula; the engine itself is only bit-compatible within a build.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const noexcept { return master_; }
  std::uint64_t derive(std::string_view experiment, std::uint64_t unit = 0) const;
  Rng stream(std::string_view experiment, std::uint64_t unit = 0) const {
    return Rng(derive(experiment, unit));
  }

 private:
  std::uint64_t master_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace klsc
