#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lrem/errors.hpp"
#include "lrem/fit.hpp"
#include "lrem/glm.hpp"
#include "lrem/spectral.hpp"
#include "oracles.hpp"

using namespace lrem;

namespace {

FitConfig tight_backtracking(double R = 0.0, int max_iter = 5000) {
  FitConfig config;
  config.R = R;
  config.step = StepPolicy::backtracking();
  config.tol = 1e-12;
  config.max_iter = max_iter;
  return config;
}

void check_monotone(const std::vector<double>& trace, double slack = 1e-10) {
  for (std::size_t t = 1; t < trace.size(); ++t) {
    CHECK(trace[t] >= trace[t - 1] - slack * (1.0 + std::abs(trace[t - 1])));
  }
}

}  // namespace

TEST_CASE("R=0 keeps the effects matrix exactly zero and reproduces IRLS") {
  for (const Family& family :
       {Family::bernoulli_logit(), Family::poisson_log()}) {
    const auto inst = oracle::random_instance(
        family.kind() == FamilyKind::BernoulliLogit ? 501 : 502, 30, 2,
        family, 0.0, 0.5);
    const FitResult res = fit(inst.A, inst.X, family, tight_backtracking());

    CHECK(oracle::max_abs(res.params.theta) == 0.0);
    CHECK(res.converged);

    const Vector irls = oracle::irls_beta(inst.A, inst.X, family);
    for (Eigen::Index k = 0; k < 2; ++k) {
      CHECK(std::abs(res.params.beta(k) - irls(k)) < 1e-4);
    }
  }
}

TEST_CASE("baseline wrapper ignores budget, rank cap, and init") {
  const auto inst =
      oracle::random_instance(510, 12, 2, Family::bernoulli_logit());
  FitConfig junk = tight_backtracking(0.0, 300);
  junk.R = 7.0;
  junk.s = 2;
  ModelParams bogus = ModelParams::zeros(12, 2);
  bogus.theta.setConstant(0.3);
  bogus.beta << 5.0, -5.0;
  junk.init = bogus;

  FitConfig clean = tight_backtracking(0.0, 300);
  const FitResult a =
      fit_glm_baseline(inst.A, inst.X, Family::bernoulli_logit(), junk);
  const FitResult b = fit(inst.A, inst.X, Family::bernoulli_logit(), clean);

  CHECK(oracle::max_abs(a.params.theta) == 0.0);
  CHECK((a.params.beta - b.params.beta).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.objective_trace.size() == b.objective_trace.size());
  for (std::size_t t = 0; t < a.objective_trace.size(); ++t) {
    CHECK(a.objective_trace[t] == b.objective_trace[t]);
  }
}

TEST_CASE("estimates respect the nuclear budget and the rank cap") {
  const auto inst =
      oracle::random_instance(520, 20, 1, Family::bernoulli_logit(), 1.0,
                              0.3, true);
  FitConfig config;
  config.R = 2.5;
  config.step = StepPolicy::backtracking();
  config.max_iter = 300;
  const FitResult free = fit(inst.A, inst.X, Family::bernoulli_logit(), config);
  CHECK(nuclear_norm(free.params.theta) <= config.R + 1e-8);

  config.s = 2;
  const FitResult capped =
      fit(inst.A, inst.X, Family::bernoulli_logit(), config);
  CHECK(nuclear_norm(capped.params.theta) <= config.R + 1e-8);
  CHECK(numerical_rank(capped.params.theta) <= 2);
}

TEST_CASE("unit lipschitz step is monotone for the logit family") {
  // gamma = 1/K = 1. Covariates are normalized to unit Frobenius norm so
  // the coefficient block's curvature stays below the unit-step threshold.
  int idx = 0;
  for (Eigen::Index m : {0, 1, 2}) {
    for (double R : {1.5, 4.0}) {
      const auto inst = oracle::random_instance(
          530 + idx++, 25, m, Family::bernoulli_logit(), 0.8, 0.3, true);
      FitConfig config;
      config.R = R;
      config.step = StepPolicy::auto_step();
      config.max_iter = 120;
      const FitResult res =
          fit(inst.A, inst.X, Family::bernoulli_logit(), config);
      check_monotone(res.objective_trace);
      CHECK(res.objective_trace.size() ==
            static_cast<std::size_t>(res.iterations) + 1);
    }
  }
}

TEST_CASE("backtracking traces are monotone for the log link") {
  const auto inst =
      oracle::random_instance(540, 18, 1, Family::poisson_log(), 0.6, 0.2);
  FitConfig config;
  config.R = 4.0;
  config.step = StepPolicy::backtracking();
  config.max_iter = 200;
  const FitResult res = fit(inst.A, inst.X, Family::poisson_log(), config);
  check_monotone(res.objective_trace, 1e-11);
  CHECK(res.clamp_events == 0);
}

TEST_CASE("identical inputs give bitwise-identical results") {
  const auto inst =
      oracle::random_instance(550, 15, 2, Family::bernoulli_logit(), 0.8,
                              0.3, true);
  FitConfig config;
  config.R = 2.0;
  config.s = 3;
  config.max_iter = 80;
  const FitResult a = fit(inst.A, inst.X, Family::bernoulli_logit(), config);
  const FitResult b = fit(inst.A, inst.X, Family::bernoulli_logit(), config);
  CHECK(oracle::max_abs(a.params.theta - b.params.theta) == 0.0);
  CHECK((a.params.beta - b.params.beta).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.objective_trace.size() == b.objective_trace.size());
  for (std::size_t t = 0; t < a.objective_trace.size(); ++t) {
    CHECK(a.objective_trace[t] == b.objective_trace[t]);
  }
}

TEST_CASE("warm starts splice exactly for stateless step policies") {
  const auto inst =
      oracle::random_instance(560, 10, 1, Family::bernoulli_logit(), 0.8,
                              0.3, true);
  for (const StepPolicy policy :
       {StepPolicy::fixed(0.5), StepPolicy::auto_step()}) {
    FitConfig config;
    config.R = 2.5;
    config.step = policy;
    config.tol = 1e-14;  // run to the iteration budget, not to tolerance

    config.max_iter = 12;
    const FitResult full = fit(inst.A, inst.X, Family::bernoulli_logit(), config);

    config.max_iter = 7;
    const FitResult head = fit(inst.A, inst.X, Family::bernoulli_logit(), config);
    config.max_iter = 5;
    config.init = head.params;
    const FitResult tail = fit(inst.A, inst.X, Family::bernoulli_logit(), config);
    config.init.reset();

    REQUIRE(head.objective_trace.size() == 8);
    REQUIRE(tail.objective_trace.size() == 6);
    CHECK(tail.objective_trace.front() == head.objective_trace.back());
    REQUIRE(full.objective_trace.size() == 13);
    for (std::size_t t = 0; t < 8; ++t) {
      CHECK(full.objective_trace[t] == head.objective_trace[t]);
    }
    for (std::size_t t = 0; t < 6; ++t) {
      CHECK(full.objective_trace[7 + t] == tail.objective_trace[t]);
    }
    CHECK(oracle::max_abs(full.params.theta - tail.params.theta) == 0.0);
  }
}

TEST_CASE("node relabeling permutes the estimate and nothing else") {
  const Eigen::Index n = 12;
  const auto inst = oracle::random_instance(
      570, n, 1, Family::bernoulli_logit(), 0.8, 0.3, true);
  FitConfig config;
  config.R = 1.5;
  config.step = StepPolicy::fixed(0.3);
  config.tol = 1e-14;
  config.max_iter = 40;
  const FitResult base = fit(inst.A, inst.X, Family::bernoulli_logit(), config);

  auto p = [n](Eigen::Index i) { return (i + 3) % n; };
  AdjacencyMatrix A2(Matrix(n, n));
  CovariateTensor X2;
  X2.matrices.emplace_back(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      A2.values(p(i), p(j)) = inst.A.values(i, j);
      A2.mask(p(i), p(j)) = inst.A.mask(i, j);
      X2.matrices[0](p(i), p(j)) = inst.X.matrices[0](i, j);
    }
  }
  const FitResult perm = fit(A2, X2, Family::bernoulli_logit(), config);

  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(perm.params.theta(p(i), p(j)) -
                                       base.params.theta(i, j)));
    }
  }
  CHECK(worst <= 1e-10);
  CHECK(std::abs(perm.params.beta(0) - base.params.beta(0)) <= 1e-10);
  REQUIRE(perm.objective_trace.size() == base.objective_trace.size());
  for (std::size_t t = 0; t < base.objective_trace.size(); ++t) {
    CHECK(std::abs(perm.objective_trace[t] - base.objective_trace[t]) <=
          1e-10 * (1.0 + std::abs(base.objective_trace[t])));
  }
}

TEST_CASE("separable data: unit steps stall honestly, backtracking converges") {
  // One observed entry with A=1 and a matching indicator covariate: the
  // likelihood has no maximizer (beta wants to grow without bound). Under
  // gamma = 1 the coefficient grows like log t, the relative objective
  // change at t=500 is still above 1e-6, and the fit must report
  // non-convergence rather than a fake optimum.
  Matrix values = Matrix::Zero(2, 2);
  values(0, 1) = 1.0;
  AdjacencyMatrix A(values);
  A.mask.setConstant(false);
  A.mask(0, 1) = true;
  CovariateTensor X;
  Matrix X1 = Matrix::Zero(2, 2);
  X1(0, 1) = 1.0;
  X.matrices.push_back(X1);

  FitConfig config;  // R = 0, tol = 1e-6, max_iter = 500
  config.step = StepPolicy::auto_step();
  const FitResult stalled = fit(A, X, Family::bernoulli_logit(), config);
  CHECK_FALSE(stalled.converged);
  CHECK(stalled.iterations == 500);
  CHECK(stalled.params.beta(0) > 5.0);
  CHECK(std::isfinite(stalled.objective_trace.back()));
  check_monotone(stalled.objective_trace, 0.0);

  config.step = StepPolicy::backtracking();
  const FitResult accel = fit(A, X, Family::bernoulli_logit(), config);
  CHECK(accel.converged);
  CHECK(accel.iterations < 500);
}

TEST_CASE("sustained objective decline raises a divergence error with trace") {
  // Poisson with all-ones data: the optimum is Theta = 0. A fixed step of
  // 2.2 makes the iteration an unstable oscillation (multiplier -1.2), and
  // while the amplitude is small the objective is locally quadratic, so
  // every iteration declines — without the iterates ever going non-finite.
  AdjacencyMatrix A(Matrix::Constant(2, 2, 1.0));
  const CovariateTensor X;
  FitConfig config;
  config.R = 100.0;
  config.step = StepPolicy::fixed(2.2);
  ModelParams init = ModelParams::zeros(2, 0);
  init.theta.setConstant(0.02);
  config.init = init;

  try {
    fit(A, X, Family::poisson_log(), config);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.trace().size() >= 11);
    const auto& tr = e.trace();
    // The tail of the trace is the run of declines that tripped the guard.
    for (std::size_t t = tr.size() - 10; t < tr.size(); ++t) {
      CHECK(tr[t] < tr[t - 1] - 1e-6);
    }
  }
}

TEST_CASE("non-finite objective under a fixed step is a numeric error") {
  // All-ones data and covariate from the zero start: the coefficient
  // gradient is exactly 2, so a 1e308 step overflows beta to infinity.
  // (Theta cannot be the overflow route here: the projection would collapse
  // an astronomically large matrix back into the budget ball.)
  AdjacencyMatrix A(Matrix::Constant(2, 2, 1.0));
  CovariateTensor X;
  X.matrices.push_back(Matrix::Constant(2, 2, 1.0));
  FitConfig config;
  config.step = StepPolicy::fixed(1e308);
  CHECK_THROWS_AS(fit(A, X, Family::bernoulli_logit(), config), NumericError);
}

TEST_CASE("backtracking absorbs an overshooting first step") {
  // Counts near e^3 make the unit initial step (K = 1 at the zero iterate)
  // overshoot badly; the line search must shrink, never throw, and still
  // reach the per-entry optimum eta = log A.
  Matrix values(2, 2);
  values << 1.0, 7.0, 20.0, 2.0;
  const AdjacencyMatrix A(values);
  const CovariateTensor X;
  FitConfig config;
  config.R = 1e6;
  config.step = StepPolicy::backtracking();
  config.tol = 1e-10;
  config.max_iter = 3000;
  const FitResult res = fit(A, X, Family::poisson_log(), config);
  CHECK(res.converged);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      CHECK(std::abs(res.params.theta(i, j) - std::log(values(i, j))) <
            1e-2);
    }
  }
}

TEST_CASE("configuration validation rejects unusable settings") {
  const auto inst =
      oracle::random_instance(590, 5, 1, Family::bernoulli_logit());
  const Family fam = Family::bernoulli_logit();
  auto with = [&](auto mutate) {
    FitConfig config;
    mutate(config);
    return fit(inst.A, inst.X, fam, config);
  };

  CHECK_THROWS_AS(with([](FitConfig& c) { c.R = -1.0; }), InputError);
  CHECK_THROWS_AS(
      with([](FitConfig& c) { c.R = std::numeric_limits<double>::quiet_NaN(); }),
      InputError);
  CHECK_THROWS_AS(with([](FitConfig& c) { c.s = 0; }), InputError);
  CHECK_THROWS_AS(with([](FitConfig& c) { c.s = 6; }), InputError);
  CHECK_THROWS_AS(with([](FitConfig& c) { c.max_iter = 0; }), InputError);
  CHECK_THROWS_AS(with([](FitConfig& c) { c.tol = 0.0; }), InputError);
  CHECK_THROWS_AS(
      with([](FitConfig& c) { c.tol = std::numeric_limits<double>::quiet_NaN(); }),
      InputError);
  CHECK_THROWS_AS(with([](FitConfig& c) { c.step = StepPolicy::fixed(0.0); }),
                  InputError);
  CHECK_THROWS_AS(with([](FitConfig& c) { c.step = StepPolicy::fixed(-0.5); }),
                  InputError);
  CHECK_THROWS_AS(
      with([](FitConfig& c) { c.init = ModelParams::zeros(4, 1); }),
      InputError);
  CHECK_THROWS_AS(
      with([](FitConfig& c) { c.init = ModelParams::zeros(5, 3); }),
      InputError);

  // Data inadmissible for the family is caught before any iteration.
  AdjacencyMatrix bad(Matrix::Constant(3, 3, 0.5));
  CHECK_THROWS_AS(fit(bad, CovariateTensor{}, fam, FitConfig{}), InputError);
}

TEST_CASE("no covariates and R=0: the fit is the constant half matrix") {
  AdjacencyMatrix A(Matrix::Constant(4, 4, 1.0));
  A.values(1, 2) = 0.0;
  const FitResult res =
      fit(A, CovariateTensor{}, Family::bernoulli_logit(), FitConfig{});
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  REQUIRE(res.objective_trace.size() == 2);
  CHECK(res.objective_trace[0] == res.objective_trace[1]);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(res.mean(i, j) == 0.5);
  }
}

TEST_CASE("a full rank cap reproduces the uncapped fit") {
  const auto inst =
      oracle::random_instance(600, 8, 0, Family::bernoulli_logit());
  FitConfig config;
  config.R = 2.0;
  config.step = StepPolicy::fixed(0.4);
  config.tol = 1e-14;
  config.max_iter = 30;
  const FitResult plain = fit(inst.A, inst.X, Family::bernoulli_logit(), config);
  config.s = 8;
  const FitResult capped = fit(inst.A, inst.X, Family::bernoulli_logit(), config);
  CHECK(oracle::max_abs(plain.params.theta - capped.params.theta) <= 1e-12);
}

TEST_CASE("the trace starts at the supplied initial point") {
  const auto inst = oracle::random_instance(
      610, 7, 1, Family::bernoulli_logit(), 0.5, 0.5, true);
  ModelParams init = ModelParams::zeros(7, 1);
  init.theta.setConstant(0.2);
  init.beta << -0.4;
  FitConfig config;
  config.R = 3.0;
  config.step = StepPolicy::fixed(0.2);
  config.max_iter = 5;
  config.tol = 1e-14;
  config.init = init;
  const FitResult res = fit(inst.A, inst.X, Family::bernoulli_logit(), config);
  CHECK(res.objective_trace[0] ==
        log_likelihood(inst.A, inst.X, init, Family::bernoulli_logit()));
  CHECK(res.objective_trace.back() >= res.objective_trace.front());
  CHECK(oracle::max_abs(res.mean - mean_matrix(res.params, inst.X,
                                               Family::bernoulli_logit())) ==
        0.0);
}

TEST_CASE("clamp events during fitting are surfaced") {
  AdjacencyMatrix A(Matrix::Constant(2, 2, 1.0));
  FitConfig config;
  config.R = 200.0;
  config.step = StepPolicy::fixed(1e-6);
  config.max_iter = 1;
  ModelParams init = ModelParams::zeros(2, 0);
  init.theta.setConstant(35.0);  // beyond the +-30 exp clamp
  config.init = init;
  const FitResult res = fit(A, CovariateTensor{}, Family::poisson_log(), config);
  CHECK(res.clamp_events >= 4);
}
