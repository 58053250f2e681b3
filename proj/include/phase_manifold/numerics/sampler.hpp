#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace phase_manifold::numerics {

// Stable 64-bit mixing of a seed with a list of indices (splitmix64 finalizer
// applied per component). Used to give every worker / trial its own stream.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

// Reproducible stream of iid standard normals.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  double operator()() { return normal_(engine_); }

  void fill(std::span<double> out) {
    for (double& v : out) v = normal_(engine_);
  }

  // Uniform integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t seed_;
};

}  // namespace phase_manifold::numerics
