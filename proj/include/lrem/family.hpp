#pragma once

#include <cstdint>
#include <string>

namespace lrem {

enum class FamilyKind { BernoulliLogit, PoissonLog };

/// Counters for numerical safeguards hit during entrywise evaluations.
struct EvalCounters {
  std::int64_t clamped = 0;
};

/// Exponential-family / canonical-link bundle.
///
/// Supplies the link L, its inverse L⁻¹ = b′ (the mean function), the
/// cumulant b, and a Lipschitz bound for the log-likelihood gradient.
/// For the log link, exp arguments are clamped to [-30, 30] so that an
/// iterative solver transiently leaving the sane parameter range cannot
/// overflow; clamp events are counted when a counter is supplied.
class Family {
 public:
  static Family bernoulli_logit() { return Family(FamilyKind::BernoulliLogit); }
  static Family poisson_log() { return Family(FamilyKind::PoissonLog); }

  FamilyKind kind() const noexcept { return kind_; }
  const char* name() const noexcept;

  /// Link L(mu) — logit for Bernoulli, log for Poisson.
  double link(double mu) const;

  /// Inverse link L⁻¹(eta) = b′(eta), applied entrywise to form the mean.
  double mean(double eta, EvalCounters* counters = nullptr) const;

  /// Cumulant b(eta): log(1+e^eta) for Bernoulli, e^eta for Poisson.
  double cumulant(double eta, EvalCounters* counters = nullptr) const;

  /// Variance function b″(eta).
  double variance(double eta, EvalCounters* counters = nullptr) const;

  /// True when x is an admissible observed edge value for this family
  /// (Bernoulli: 0 or 1; Poisson: a non-negative integer).
  bool admissible_value(double x) const;

  static Family parse(const std::string& name);

  static constexpr double kExpClamp = 30.0;

 private:
  explicit Family(FamilyKind kind) : kind_(kind) {}
  FamilyKind kind_;
};

inline bool operator==(const Family& a, const Family& b) {
  return a.kind() == b.kind();
}

}  // namespace lrem
