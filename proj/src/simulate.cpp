#include "lrem/simulate.hpp"

#include <cmath>
#include <string>

#include "lrem/errors.hpp"
#include "lrem/glm.hpp"
#include "lrem/rng.hpp"
#include "lrem/spectral.hpp"

namespace lrem {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::uint64_t seed) {
  Rng rng(seed);
  Matrix G(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = rng.gaussian();
  return G;
}

}  // namespace

Matrix orthonormal_covariate(Eigen::Index n, std::uint64_t seed) {
  if (n < 2) throw InputError("orthonormal_covariate: n must be >= 2");
  const SvdFactors f = svd(gaussian_matrix(n, n, seed));
  return f.U * f.V.transpose();
}

SimTruth generate_truth(const SimDesign& design) {
  if (design.n < 2) throw InputError("generate_truth: n must be >= 2");
  if (design.r < 1) throw InputError("generate_truth: r must be >= 1");
  if (!std::isfinite(design.alpha) || !std::isfinite(design.c)) {
    throw InputError("generate_truth: alpha and c must be finite");
  }
  const Eigen::Index n = design.n;

  SimTruth truth;
  truth.params.theta =
      Matrix::Constant(n, n, design.alpha);  // alpha * ones
  if (design.r > 1) {
    const Matrix Z = gaussian_matrix(n, design.r - 1, derive_seed(design.seed, 0));
    truth.params.theta += Z * Z.transpose();
  }
  truth.params.beta = Vector(2);
  truth.params.beta << design.c, -design.c;

  truth.X.matrices.push_back(
      orthonormal_covariate(n, derive_seed(design.seed, 1)));
  truth.X.matrices.push_back(
      orthonormal_covariate(n, derive_seed(design.seed, 2)));

  truth.P = mean_matrix(truth.params, truth.X, design.family);
  return truth;
}

AdjacencyMatrix sample_network(const Matrix& P, const Family& family,
                               std::uint64_t seed) {
  const Eigen::Index n = P.rows();
  if (P.cols() != n) throw InputError("sample_network: P must be square");
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = P(i, j);
      if (!std::isfinite(p) || p < 0.0 ||
          (family.kind() == FamilyKind::BernoulliLogit && p > 1.0)) {
        throw InputError("sample_network: P(" + std::to_string(i) + "," +
                         std::to_string(j) + ") = " + std::to_string(p) +
                         " outside the " + family.name() + " mean range");
      }
    }
  }

  Matrix A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng row_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (family.kind() == FamilyKind::BernoulliLogit) {
        A(i, j) = row_rng.bernoulli(P(i, j)) ? 1.0 : 0.0;
      } else {
        A(i, j) = static_cast<double>(row_rng.poisson(P(i, j)));
      }
    }
  }
  return AdjacencyMatrix(std::move(A));
}

}  // namespace lrem
