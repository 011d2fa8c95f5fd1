#include "lrem/spectral.hpp"

#include <Eigen/Householder>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lrem/errors.hpp"

namespace lrem {

namespace {

constexpr Eigen::Index kTruncatedSvdMinDim = 500;
constexpr double kTruncationTieTol = 1e-6;

// Reconstruction from shrunk singular values; triplets with (sigma_i - c)+ = 0
// are dropped entirely.
Matrix shrink_reconstruct(const SvdFactors& f, double c, Eigen::Index limit) {
  const Eigen::Index n = f.U.rows();
  Eigen::Index keep = 0;
  while (keep < limit && f.sigma(keep) > c) ++keep;
  if (keep == 0) return Matrix::Zero(n, f.V.rows());
  Vector shrunk = f.sigma.head(keep).array() - c;
  return f.U.leftCols(keep) * shrunk.asDiagonal() *
         f.V.leftCols(keep).transpose();
}

}  // namespace

SvdFactors svd(const Matrix& M) {
  if (!M.allFinite()) {
    throw InputError("svd: non-finite entries in input matrix");
  }
  Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success) {
    throw NumericError(
        "svd: decomposition did not converge within the solver's internal "
        "iteration limit on a " +
        std::to_string(M.rows()) + "x" + std::to_string(M.cols()) + " matrix");
  }
  SvdFactors f;
  f.U = dec.matrixU();
  f.sigma = dec.singularValues();
  f.V = dec.matrixV();
  return f;
}

SvdFactors svd_truncated(const Matrix& M, Eigen::Index k) {
  const Eigen::Index n = std::min(M.rows(), M.cols());
  k = std::min(k, n);
  if (k <= 0 || k >= n / 2) {
    // Small margin between k and n makes the subspace iteration pointless.
    SvdFactors full = svd(M);
    full.U.conservativeResize(Eigen::NoChange, k);
    full.sigma.conservativeResize(k);
    full.V.conservativeResize(Eigen::NoChange, k);
    return full;
  }

  // Gaussian test matrix from a fixed seed: results are a pure function of
  // the input bytes.
  std::mt19937_64 gen(0x5eedfacefeedULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix omega(M.cols(), k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < M.cols(); ++i) omega(i, j) = normal(gen);

  Matrix Q = (M * omega).householderQr().householderQ() *
             Matrix::Identity(M.rows(), k);
  constexpr int kPowerSteps = 6;
  for (int step = 0; step < kPowerSteps; ++step) {
    Matrix Z = (M.transpose() * Q).householderQr().householderQ() *
               Matrix::Identity(M.cols(), k);
    Q = (M * Z).householderQr().householderQ() *
        Matrix::Identity(M.rows(), k);
  }

  const Matrix B = Q.transpose() * M;  // k x cols
  Eigen::BDCSVD<Matrix> dec(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw NumericError("svd_truncated: small-core decomposition failed");
  }
  SvdFactors f;
  f.U = Q * dec.matrixU();
  f.sigma = dec.singularValues();
  f.V = dec.matrixV();
  return f;
}

double soft_threshold_level(const Vector& sigma, double R) {
  if (R < 0) throw InputError("soft_threshold_level: R must be >= 0");
  const Eigen::Index n = sigma.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sigma(i) < 0) {
      throw InputError("soft_threshold_level: negative singular value");
    }
    if (i + 1 < n && sigma(i) < sigma(i + 1)) {
      throw InputError(
          "soft_threshold_level: input must be sorted non-increasing");
    }
  }
  if (n == 0) return 0.0;
  const double total = sigma.sum();
  if (total <= R) return 0.0;

  // Find the largest active-set size k with sigma_k > (S_k - R)/k; the
  // shrinkage level is then (S_k - R)/k and sum_(i<=k) (sigma_i - c) = R by
  // construction.
  double prefix = 0.0;
  double c = 0.0;
  bool accepted = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    prefix += sigma(k);
    const double candidate = (prefix - R) / static_cast<double>(k + 1);
    if (sigma(k) > candidate) {
      c = candidate;
      accepted = true;
    } else {
      break;
    }
  }
  if (!accepted) {
    // Only reachable when R is below one ulp of sigma_1, where
    // (sigma_1 - R) rounds to sigma_1 and the scan rejects k = 1; the
    // correctly rounded level then collapses the whole spectrum. An
    // accepted level of exactly 0.0 is different and legitimate: the
    // prefix sum rounded to R, so shrinking by zero is already feasible.
    c = sigma(0);
  }
  return c;
}

Matrix project_nuclear(const Matrix& M, double R) {
  if (R < 0) throw InputError("project_nuclear: R must be >= 0");
  if (R == 0.0) {
    // The only feasible point is the zero matrix.
    if (M.isZero(0.0)) return M;
    return Matrix::Zero(M.rows(), M.cols());
  }
  const SvdFactors f = svd(M);
  if (f.sigma.sum() <= R) return M;
  const double c = soft_threshold_level(f.sigma, R);
  return shrink_reconstruct(f, c, f.sigma.size());
}

Matrix project_nuclear_rank(const Matrix& M, double R, Eigen::Index s) {
  if (R < 0) throw InputError("project_nuclear_rank: R must be >= 0");
  const Eigen::Index n = std::min(M.rows(), M.cols());
  if (s < 1 || s > n) {
    throw InputError("project_nuclear_rank: s must be in [1, n], got " +
                     std::to_string(s));
  }
  if (R == 0.0) {
    if (M.isZero(0.0)) return M;
    return Matrix::Zero(M.rows(), M.cols());
  }

  SvdFactors f;
  bool have_full_tail = true;
  if (n > kTruncatedSvdMinDim && s + 5 < n / 2) {
    f = svd_truncated(M, s + 5);
    have_full_tail = false;
    if (f.sigma.size() > s &&
        f.sigma(s - 1) - f.sigma(s) < kTruncationTieTol) {
      // Ambiguous cut between sigma_s and sigma_{s+1}: fall back to the full
      // decomposition and keep the first s triplets in returned order.
      f = svd(M);
      have_full_tail = true;
    }
  } else {
    f = svd(M);
  }

  const Eigen::Index avail = f.sigma.size();
  const Eigen::Index top = std::min(s, avail);
  const Vector sigma_top = f.sigma.head(top);

  // Pass-through: already rank <= s and within budget.
  const double tail_tol = 1e-8 * (avail > 0 ? f.sigma(0) : 0.0);
  const double tail_max = avail > top ? f.sigma(top) : 0.0;
  if (have_full_tail || avail > top) {
    if (tail_max <= tail_tol && sigma_top.sum() <= R) return M;
  }

  const double c = soft_threshold_level(sigma_top, R);
  return shrink_reconstruct(f, c, top);
}

double nuclear_norm(const Matrix& M) { return svd(M).sigma.sum(); }

Eigen::Index numerical_rank(const Matrix& M, double tol) {
  const Vector sigma = svd(M).sigma;
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > tol * sigma(0)) ++r;
  }
  return r;
}

}  // namespace lrem
