#pragma once

#include <cstdint>
#include <random>

namespace lrem {

// Derive an independent child seed from (seed, stream). Used to give each
// row / covariate / replicate its own substream so that results do not
// depend on evaluation order and stay identical across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic generator wrapping std::mt19937_64. All distributions are
// implemented by hand on top of the raw 64-bit stream because the standard
// leaves <random> distribution algorithms unspecified; std::mt19937_64
// itself is pinned exactly by the standard, so every draw here is
// bit-reproducible across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Standard normal via the Marsaglia polar method (one spare cached).
  double gaussian();

  bool bernoulli(double p);

  // Poisson draw; exact for small lambda (Knuth product method), and split
  // additively for large lambda where exp(-lambda) underflows.
  std::int64_t poisson(double lambda);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lrem
