#include <doctest.h>

#include <cmath>
#include <limits>

#include "lrem/errors.hpp"
#include "lrem/rng.hpp"
#include "lrem/spectral.hpp"
#include "oracles.hpp"

using namespace lrem;

namespace {

Matrix random_matrix(Eigen::Index n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  return oracle::gaussian_matrix(n, n, rng, scale);
}

// Rank-k matrix with a prescribed spectrum, built from random orthonormal
// factors.
Matrix with_spectrum(Eigen::Index n, const Vector& sigma, std::uint64_t seed) {
  const SvdFactors fu = svd(random_matrix(n, seed));
  const SvdFactors fv = svd(random_matrix(n, seed + 1));
  const Eigen::Index k = sigma.size();
  return fu.U.leftCols(k) * sigma.asDiagonal() * fv.U.leftCols(k).transpose();
}

}  // namespace

TEST_CASE("full SVD reconstructs with orthonormal factors and sorted spectrum") {
  const Matrix M = random_matrix(8, 5);
  const SvdFactors f = svd(M);
  CHECK(oracle::max_abs(f.U * f.sigma.asDiagonal() * f.V.transpose() - M) <
        1e-12);
  CHECK(oracle::max_abs(f.U.transpose() * f.U - Matrix::Identity(8, 8)) <
        1e-12);
  CHECK(oracle::max_abs(f.V.transpose() * f.V - Matrix::Identity(8, 8)) <
        1e-12);
  for (Eigen::Index i = 0; i + 1 < f.sigma.size(); ++i) {
    CHECK(f.sigma(i) >= f.sigma(i + 1));
  }
  CHECK(f.sigma.minCoeff() >= 0.0);
}

TEST_CASE("SVD rejects non-finite input") {
  Matrix M = Matrix::Zero(3, 3);
  M(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd(M), InputError);
}

TEST_CASE("soft-threshold level: worked cases") {
  Vector sigma(3);
  sigma << 3.0, 2.0, 1.0;

  // Already feasible.
  CHECK(soft_threshold_level(sigma, 6.0) == 0.0);
  CHECK(soft_threshold_level(sigma, 7.5) == 0.0);
  // Budget 3: level 1 keeps (2, 1, 0), summing to exactly 3.
  CHECK(soft_threshold_level(sigma, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  // Budget 0 collapses the whole spectrum.
  CHECK(soft_threshold_level(sigma, 0.0) == 3.0);
  // Budget within the top value only.
  CHECK(soft_threshold_level(sigma, 0.5) ==
        doctest::Approx(2.5).epsilon(1e-15));

  CHECK(soft_threshold_level(Vector(0), 1.0) == 0.0);
  CHECK_THROWS_AS(soft_threshold_level(sigma, -1.0), InputError);
  Vector unsorted(2);
  unsorted << 1.0, 2.0;
  CHECK_THROWS_AS(soft_threshold_level(unsorted, 1.0), InputError);
  Vector negative(2);
  negative << 1.0, -0.5;
  CHECK_THROWS_AS(soft_threshold_level(negative, 1.0), InputError);
}

TEST_CASE("soft-threshold level matches the bisection reference") {
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.uniform01() * 20);
    Vector sigma(n);
    for (Eigen::Index i = 0; i < n; ++i) sigma(i) = std::abs(rng.gaussian());
    std::sort(sigma.data(), sigma.data() + n, std::greater<double>());
    const double R = rng.uniform01() * 1.2 * sigma.sum();

    const double c = soft_threshold_level(sigma, R);
    const Vector got = (sigma.array() - c).max(0.0);
    const Vector want = oracle::project_l1_bisect(sigma, R);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10);
    // The level is exact, not approximate: the shrunk sum hits the budget
    // (or the spectrum was feasible to begin with).
    if (sigma.sum() > R) {
      CHECK(got.sum() == doctest::Approx(R).epsilon(1e-12));
    }
  }
}

TEST_CASE("nuclear projection: pass-through, zero budget, boundary") {
  const Matrix M = random_matrix(6, 9);
  const double norm = nuclear_norm(M);

  // Feasible input comes back with no SVD round-trip applied.
  CHECK(oracle::max_abs(project_nuclear(M, norm * 1.01) - M) == 0.0);

  // R = 0: the only feasible point.
  CHECK(oracle::max_abs(project_nuclear(M, 0.0)) == 0.0);
  const Matrix zero = Matrix::Zero(4, 4);
  CHECK(oracle::max_abs(project_nuclear(zero, 0.0)) == 0.0);

  // Binding budget: lands on the boundary of the ball.
  const Matrix P = project_nuclear(M, norm * 0.4);
  CHECK(nuclear_norm(P) <= norm * 0.4 + 1e-8);
  CHECK(nuclear_norm(P) == doctest::Approx(norm * 0.4).epsilon(1e-10));

  CHECK_THROWS_AS(project_nuclear(M, -2.0), InputError);
}

TEST_CASE("nuclear projection of a diagonal matrix is the vector projection") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 6;
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = 2.0 * rng.gaussian();
    const double R = rng.uniform01() * d.cwiseAbs().sum();
    const Matrix P = project_nuclear(Matrix(d.asDiagonal()), R);

    // Reference: project |d| onto the l1 ball, restore signs and positions.
    const Vector mags = oracle::project_l1_bisect(d.cwiseAbs(), R);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double want = (d(i) < 0 ? -1.0 : 1.0) * mags(i);
      CHECK(std::abs(P(i, i) - want) <= 1e-10);
    }
    Matrix off = P;
    off.diagonal().setZero();
    CHECK(oracle::max_abs(off) <= 1e-10);
  }
}

TEST_CASE("nuclear projection is idempotent and non-expansive") {
  for (std::uint64_t seed : {21, 22, 23}) {
    const Matrix M1 = random_matrix(7, seed);
    const Matrix M2 = random_matrix(7, seed + 100);
    const double R = 0.3 * nuclear_norm(M1);
    const Matrix P1 = project_nuclear(M1, R);
    const Matrix P2 = project_nuclear(M2, R);
    CHECK(oracle::max_abs(project_nuclear(P1, R) - P1) <= 1e-8);
    CHECK((P1 - P2).norm() <= (M1 - M2).norm() * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("nuclear projection preserves symmetry") {
  const Matrix G = random_matrix(9, 31);
  const Matrix M = G + G.transpose();
  const Matrix P = project_nuclear(M, 0.35 * nuclear_norm(M));
  CHECK(oracle::max_abs(P - P.transpose()) <= 1e-10);
}

TEST_CASE("rank-capped projection matches truncate-then-project") {
  for (Eigen::Index s : {1, 3}) {
    for (double frac : {0.25, 0.9}) {
      const Matrix M = random_matrix(12, 400 + static_cast<std::uint64_t>(s));
      const SvdFactors f = svd(M);
      const double R = frac * f.sigma.head(s).sum();

      const Matrix got = project_nuclear_rank(M, R, s);
      const Matrix trunc = f.U.leftCols(s) * f.sigma.head(s).asDiagonal() *
                           f.V.leftCols(s).transpose();
      const Matrix want = project_nuclear(trunc, R);
      CHECK(oracle::max_abs(got - want) <= 1e-9);
      CHECK(numerical_rank(got) <= s);
      CHECK(nuclear_norm(got) <= R + 1e-8);
    }
  }
}

TEST_CASE("rank-capped projection: pass-through and validation") {
  Vector sigma(2);
  sigma << 2.0, 1.0;
  const Matrix M = with_spectrum(8, sigma, 51);

  // Already rank 2 with nuclear norm 3: a cap at s=2, R=4 changes nothing.
  CHECK(oracle::max_abs(project_nuclear_rank(M, 4.0, 2) - M) == 0.0);

  // s = n behaves like the plain nuclear projection.
  const Matrix dense = random_matrix(8, 52);
  CHECK(oracle::max_abs(project_nuclear_rank(dense, 3.0, 8) -
                        project_nuclear(dense, 3.0)) <= 1e-12);

  CHECK(oracle::max_abs(project_nuclear_rank(dense, 0.0, 3)) == 0.0);
  CHECK_THROWS_AS(project_nuclear_rank(dense, 1.0, 0), InputError);
  CHECK_THROWS_AS(project_nuclear_rank(dense, 1.0, 9), InputError);
  CHECK_THROWS_AS(project_nuclear_rank(dense, -1.0, 2), InputError);
}

TEST_CASE("rank-capped projection on a large matrix (iterative top-k path)") {
  // Dominant rank-3 spectrum with a tiny tail: the subspace iteration
  // resolves the top triplets to machine precision, and the result must
  // agree with the full-decomposition reference.
  const Eigen::Index n = 600;
  Vector sigma(10);
  sigma << 20.0, 10.0, 5.0, 1e-4, 5e-5, 2e-5, 1e-5, 5e-6, 2e-6, 1e-6;
  const Matrix M = with_spectrum(n, sigma, 61);

  const double R = 24.0;  // binding: top-3 sum is 35
  const Matrix got = project_nuclear_rank(M, R, 3);

  const SvdFactors f = svd(M);
  const Matrix trunc = f.U.leftCols(3) * f.sigma.head(3).asDiagonal() *
                       f.V.leftCols(3).transpose();
  const Matrix want = project_nuclear(trunc, R);

  CHECK((got - want).norm() <= 1e-6 * want.norm());
  CHECK(nuclear_norm(got) <= R + 1e-8);
  CHECK(numerical_rank(got) <= 3);
}

TEST_CASE("rank-capped projection falls back to the full SVD on tied spectra") {
  const Eigen::Index n = 600;
  Vector sigma(6);
  sigma << 5.0, 5.0, 5.0, 5.0, 5.0, 5.0;  // cut at s=3 is ambiguous
  const Matrix M = with_spectrum(n, sigma, 71);

  const Matrix got = project_nuclear_rank(M, 9.0, 3);
  const SvdFactors f = svd(M);
  const Matrix trunc = f.U.leftCols(3) * f.sigma.head(3).asDiagonal() *
                       f.V.leftCols(3).transpose();
  const Matrix want = project_nuclear(trunc, 9.0);
  CHECK((got - want).norm() <= 1e-9 * (1.0 + want.norm()));
  CHECK(nuclear_norm(got) <= 9.0 + 1e-8);
}

TEST_CASE("iterative top-k SVD agrees with the full decomposition") {
  Vector sigma(5);
  sigma << 10.0, 8.0, 6.0, 4.0, 2.0;
  const Matrix M = with_spectrum(100, sigma, 81);

  const SvdFactors t = svd_truncated(M, 5);
  REQUIRE(t.sigma.size() == 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(t.sigma(i) == doctest::Approx(sigma(i)).epsilon(1e-8));
  }
  CHECK(oracle::max_abs(t.U.transpose() * t.U - Matrix::Identity(5, 5)) <
        1e-10);
  CHECK(oracle::max_abs(t.V.transpose() * t.V - Matrix::Identity(5, 5)) <
        1e-10);
  CHECK((t.U * t.sigma.asDiagonal() * t.V.transpose() - M).norm() <=
        1e-8 * M.norm());

  // k too close to n: quietly served by the full decomposition.
  const Matrix small = random_matrix(10, 82);
  const SvdFactors f = svd(small);
  const SvdFactors h = svd_truncated(small, 6);
  REQUIRE(h.sigma.size() == 6);
  CHECK((h.sigma - f.sigma.head(6)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("nuclear norm and numerical rank") {
  Vector d(3);
  d << 1.0, -2.0, 3.0;
  CHECK(nuclear_norm(Matrix(d.asDiagonal())) ==
        doctest::Approx(6.0).epsilon(1e-12));

  Vector sigma(2);
  sigma << 4.0, 0.5;
  CHECK(numerical_rank(with_spectrum(7, sigma, 91)) == 2);
  CHECK(numerical_rank(Matrix::Zero(4, 4)) == 0);
  CHECK(numerical_rank(Matrix::Identity(5, 5)) == 5);
}
