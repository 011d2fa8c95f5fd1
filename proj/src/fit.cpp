#include "lrem/fit.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "lrem/errors.hpp"
#include "lrem/glm.hpp"
#include "lrem/spectral.hpp"

namespace lrem {

namespace {

constexpr int kMaxShrinks = 40;
constexpr double kShrink = 0.5;
constexpr double kGrowth = 1.1;
constexpr double kDivergenceDrop = 1e-6;
constexpr int kDivergenceRun = 10;

void validate_config(const FitConfig& config, Eigen::Index n) {
  if (!(config.R >= 0.0)) throw InputError("fit: R must be >= 0");
  if (config.s && (*config.s < 1 || *config.s > n)) {
    throw InputError("fit: rank cap s must be in [1, n], got " +
                     std::to_string(*config.s));
  }
  if (config.step && config.step->kind == StepPolicy::Kind::Fixed &&
      !(config.step->gamma > 0.0)) {
    throw InputError("fit: fixed step size must be > 0");
  }
  if (config.max_iter < 1) throw InputError("fit: max_iter must be >= 1");
  if (!(config.tol > 0.0)) throw InputError("fit: tol must be > 0");
}

Matrix project(const Matrix& M, const FitConfig& config) {
  if (config.R == 0.0) return Matrix::Zero(M.rows(), M.cols());
  if (config.s) return project_nuclear_rank(M, config.R, *config.s);
  return project_nuclear(M, config.R);
}

struct Candidate {
  ModelParams params;
  double objective = 0.0;
  bool finite = false;
  // Counted separately so clamp events on rejected line-search trials never
  // reach the caller; only evaluations behind accepted iterates are
  // reported.
  EvalCounters counters;
};

}  // namespace

FitResult fit(const AdjacencyMatrix& A, const CovariateTensor& X,
              const Family& family, const FitConfig& config) {
  const Eigen::Index n = A.n();
  validate_config(config, n);
  validate_values(A, family);

  ModelParams params =
      config.init ? *config.init : ModelParams::zeros(n, X.m());
  validate_dimensions(A, X, params);

  const StepPolicy policy = config.step.value_or(
      family.kind() == FamilyKind::BernoulliLogit ? StepPolicy::auto_step()
                                                  : StepPolicy::backtracking());

  EvalCounters counters;
  double objective = log_likelihood(A, X, params, family, &counters);

  FitResult result;
  result.objective_trace.reserve(static_cast<std::size_t>(config.max_iter) + 1);
  result.objective_trace.push_back(objective);

  // Backtracking keeps its accepted step across iterations.
  double bt_gamma = policy.kind == StepPolicy::Kind::Backtracking
                        ? 1.0 / lipschitz_bound(params, X, family)
                        : 0.0;
  int decline_run = 0;

  auto attempt = [&](double gamma, const Vector& gb) -> Candidate {
    Candidate cand;
    // Full beta step at the old iterate.
    cand.params.beta = params.beta + gamma * gb;
    // Theta step uses the fresh beta.
    ModelParams mid{params.theta, cand.params.beta};
    const Matrix gt = grad_theta(A, X, mid, family, &cand.counters);
    cand.params.theta = project(params.theta + gamma * gt, config);
    ModelParams& next = cand.params;
    if (!next.theta.allFinite() ||
        (next.beta.size() > 0 && !next.beta.allFinite())) {
      return cand;
    }
    cand.objective =
        log_likelihood_unchecked(A, X, next, family, &cand.counters);
    cand.finite = std::isfinite(cand.objective);
    return cand;
  };

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const Vector gb = grad_beta(A, X, params, family, &counters);
    Candidate accepted;
    bool exhausted = false;

    switch (policy.kind) {
      case StepPolicy::Kind::Fixed:
        accepted = attempt(policy.gamma, gb);
        break;
      case StepPolicy::Kind::Auto:
        accepted = attempt(1.0 / lipschitz_bound(params, X, family), gb);
        break;
      case StepPolicy::Kind::Backtracking: {
        const double slack = 1e-12 * (1.0 + std::abs(objective));
        double gamma = bt_gamma;
        for (int shrink = 0;; ++shrink) {
          accepted = attempt(gamma, gb);
          if (accepted.finite && accepted.objective >= objective - slack) {
            break;
          }
          if (shrink >= kMaxShrinks) {
            exhausted = true;
            break;
          }
          gamma *= kShrink;
        }
        if (!exhausted) bt_gamma = gamma * kGrowth;
        break;
      }
    }

    if (!accepted.finite) {
      throw NumericError(
          "fit: objective became non-finite at iteration " +
          std::to_string(iter) +
          (policy.kind == StepPolicy::Kind::Backtracking
               ? " even at the smallest backtracking step"
               : "; a smaller step size or the backtracking policy may help"));
    }

    if (accepted.objective < objective - kDivergenceDrop) {
      // Under backtracking a drop this large implies the shrink budget ran
      // out; under fixed/auto it means the step size is too aggressive.
      ++decline_run;
      if (decline_run >= kDivergenceRun) {
        auto trace = result.objective_trace;
        trace.push_back(accepted.objective);
        throw DivergenceError(
            "fit: objective decreased by more than 1e-6 for " +
                std::to_string(kDivergenceRun) + " consecutive iterations",
            std::move(trace));
      }
    } else {
      decline_run = 0;
    }

    const double previous = objective;
    counters.clamped += accepted.counters.clamped;
    params = std::move(accepted.params);
    objective = accepted.objective;
    result.objective_trace.push_back(objective);
    result.iterations = iter;

    if (std::abs(objective - previous) / (1.0 + std::abs(previous)) <
        config.tol) {
      result.converged = true;
      break;
    }
  }

  result.params = std::move(params);
  result.mean = mean_matrix(result.params, X, family, &counters);
  result.clamp_events = counters.clamped;
  return result;
}

FitResult fit_glm_baseline(const AdjacencyMatrix& A, const CovariateTensor& X,
                           const Family& family, const FitConfig& config) {
  FitConfig base = config;
  base.R = 0.0;
  base.s.reset();
  base.init.reset();
  return fit(A, X, family, base);
}

}  // namespace lrem
