#include "lrem/rng.hpp"

#include <cmath>
#include <string>

#include "lrem/errors.hpp"

namespace lrem {

namespace {

// splitmix64 finalizer; good avalanche, so nearby (seed, stream) pairs give
// unrelated child seeds.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double Rng::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

bool Rng::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw NumericError("bernoulli: probability " + std::to_string(p) +
                       " outside [0, 1]");
  }
  return uniform01() < p;
}

std::int64_t Rng::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw NumericError("poisson: rate " + std::to_string(lambda) +
                       " must be finite and non-negative");
  }
  if (lambda == 0.0) return 0;
  // exp(-lambda) underflows near 745; split well before that and use
  // Poisson(a+b) = Poisson(a) + Poisson(b) on independent sub-draws.
  constexpr double kSplit = 500.0;
  std::int64_t total = 0;
  double remaining = lambda;
  while (remaining > kSplit) {
    total += poisson(kSplit);
    remaining -= kSplit;
  }
  const double limit = std::exp(-remaining);
  std::int64_t k = 0;
  double prod = uniform01();
  while (prod > limit) {
    ++k;
    prod *= uniform01();
  }
  return total + k;
}

}  // namespace lrem
