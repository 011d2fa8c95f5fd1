#include "lrem/family.hpp"

#include <cmath>
#include <stdexcept>

#include "lrem/errors.hpp"

namespace lrem {

namespace {

double clamped_exp(double eta, EvalCounters* counters) {
  if (eta > Family::kExpClamp || eta < -Family::kExpClamp) {
    if (counters) ++counters->clamped;
    eta = eta > 0 ? Family::kExpClamp : -Family::kExpClamp;
  }
  return std::exp(eta);
}

double sigmoid(double eta) {
  if (eta >= 0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace

const char* Family::name() const noexcept {
  return kind_ == FamilyKind::BernoulliLogit ? "bernoulli" : "poisson";
}

double Family::link(double mu) const {
  switch (kind_) {
    case FamilyKind::BernoulliLogit:
      return std::log(mu) - std::log1p(-mu);
    case FamilyKind::PoissonLog:
      return std::log(mu);
  }
  return 0;  // unreachable
}

double Family::mean(double eta, EvalCounters* counters) const {
  switch (kind_) {
    case FamilyKind::BernoulliLogit:
      return sigmoid(eta);
    case FamilyKind::PoissonLog:
      return clamped_exp(eta, counters);
  }
  return 0;
}

double Family::cumulant(double eta, EvalCounters* counters) const {
  switch (kind_) {
    case FamilyKind::BernoulliLogit:
      // log(1 + e^eta), overflow-safe on both tails.
      return eta > 0 ? eta + std::log1p(std::exp(-eta))
                     : std::log1p(std::exp(eta));
    case FamilyKind::PoissonLog:
      return clamped_exp(eta, counters);
  }
  return 0;
}

double Family::variance(double eta, EvalCounters* counters) const {
  switch (kind_) {
    case FamilyKind::BernoulliLogit: {
      const double p = sigmoid(eta);
      return p * (1.0 - p);
    }
    case FamilyKind::PoissonLog:
      return clamped_exp(eta, counters);
  }
  return 0;
}

bool Family::admissible_value(double x) const {
  switch (kind_) {
    case FamilyKind::BernoulliLogit:
      return x == 0.0 || x == 1.0;
    case FamilyKind::PoissonLog:
      return x >= 0.0 && std::isfinite(x) && x == std::floor(x);
  }
  return false;
}

Family Family::parse(const std::string& name) {
  if (name == "bernoulli" || name == "bernoulli-logit" || name == "logit") {
    return bernoulli_logit();
  }
  if (name == "poisson" || name == "poisson-log" || name == "log") {
    return poisson_log();
  }
  throw InputError("unknown family '" + name +
                   "' (expected 'bernoulli' or 'poisson')");
}

}  // namespace lrem
