#pragma once

#include <optional>
#include <vector>

#include "lrem/family.hpp"
#include "lrem/types.hpp"

namespace lrem {

// How the step size gamma_t is chosen each iteration.
//  - fixed: constant gamma.
//  - auto: gamma = 1/K with K = lipschitz_bound at the current iterate
//    (recomputed every iteration).
//  - backtracking: start from 1/K at the initial iterate, shrink by 0.5
//    until the objective does not decrease, grow by 1.1 after each
//    accepted iteration.
struct StepPolicy {
  enum class Kind { Fixed, Auto, Backtracking };

  Kind kind = Kind::Auto;
  double gamma = 1.0;  // used by Fixed only

  static StepPolicy fixed(double g) { return {Kind::Fixed, g}; }
  static StepPolicy auto_step() { return {Kind::Auto, 0.0}; }
  static StepPolicy backtracking() { return {Kind::Backtracking, 0.0}; }
};

struct FitConfig {
  double R = 0.0;                  // nuclear-norm budget
  std::optional<Eigen::Index> s;   // optional rank cap
  // Absent -> family default: auto for Bernoulli (K = 1 globally),
  // backtracking for Poisson (any fixed global bound is too conservative
  // because K depends on the current iterate).
  std::optional<StepPolicy> step;
  int max_iter = 500;
  double tol = 1e-6;                // relative objective-change threshold
  std::optional<ModelParams> init;  // absent -> zeros
};

struct FitResult {
  ModelParams params;
  Matrix mean;  // L^-1(Theta + sum_k beta_k X_k)
  // trace[0] is the objective at the initial point, so trace.size() ==
  // iterations + 1 and warm-started runs concatenate cleanly.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  std::int64_t clamp_events = 0;
};

// Projected gradient ascent on the log-likelihood. Each iteration takes a
// full beta gradient step (all coordinates, at the old iterate), recomputes
// the mean with the fresh beta, takes a Theta gradient step, and projects
// Theta onto the nuclear-norm ball (intersected with the rank-s set when
// config.s is present). R = 0 short-circuits the projection to the zero
// matrix, so no SVD is ever taken in that case.
//
// Stops when |l_t - l_{t-1}| / (1 + |l_{t-1}|) < tol (converged = true) or
// after max_iter iterations (converged = false). Throws DivergenceError
// when 10 consecutive accepted iterations each decrease the objective by
// more than 1e-6 (under backtracking this can only happen once the shrink
// budget is exhausted); throws NumericError on a non-finite objective that
// backtracking cannot repair.
FitResult fit(const AdjacencyMatrix& A, const CovariateTensor& X,
              const Family& family, const FitConfig& config);

// The classical GLM benchmark: fit with R = 0 and no rank cap, so Theta
// stays exactly zero and only beta is estimated. `config` passes through
// step policy and stopping parameters (R, s, and init are overridden).
// Caution: the beta block's curvature scales with sum_k ||X_k||_F^2, which
// the family's Theta-block Lipschitz bound does not cover, so the auto
// policy can overshoot on strong covariates — prefer backtracking there.
FitResult fit_glm_baseline(const AdjacencyMatrix& A, const CovariateTensor& X,
                           const Family& family,
                           const FitConfig& config = FitConfig{});

}  // namespace lrem
