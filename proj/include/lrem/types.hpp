#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "lrem/family.hpp"

namespace lrem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Observed n×n edge matrix with an optional entry mask. Masked-out
/// entries (mask=false) contribute nothing to likelihoods or gradients.
struct AdjacencyMatrix {
  Matrix values;
  BoolMatrix mask;

  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(Matrix v)
      : values(std::move(v)),
        mask(BoolMatrix::Constant(values.rows(), values.cols(), true)) {}
  AdjacencyMatrix(Matrix v, BoolMatrix m)
      : values(std::move(v)), mask(std::move(m)) {}

  Eigen::Index n() const { return values.rows(); }

  /// Number of entries participating in the likelihood.
  Eigen::Index masked_count() const {
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < mask.cols(); ++j)
      for (Eigen::Index i = 0; i < mask.rows(); ++i)
        if (mask(i, j)) ++c;
    return c;
  }

  /// Sets mask=false on the diagonal (self-loops excluded from fitting).
  void exclude_diagonal() {
    for (Eigen::Index i = 0; i < values.rows(); ++i) mask(i, i) = false;
  }
};

/// m dense n×n edge-covariate matrices; the contraction with a coefficient
/// vector beta is sum_k beta_k X_k.
struct CovariateTensor {
  std::vector<Matrix> matrices;

  CovariateTensor() = default;
  explicit CovariateTensor(std::vector<Matrix> mats)
      : matrices(std::move(mats)) {}

  Eigen::Index m() const { return static_cast<Eigen::Index>(matrices.size()); }
  Eigen::Index n() const { return matrices.empty() ? 0 : matrices[0].rows(); }
};

/// The pair (Theta: n×n effects matrix, beta: m coefficients).
struct ModelParams {
  Matrix theta;
  Vector beta;

  ModelParams() = default;
  ModelParams(Matrix t, Vector b) : theta(std::move(t)), beta(std::move(b)) {}

  static ModelParams zeros(Eigen::Index n, Eigen::Index m) {
    return ModelParams(Matrix::Zero(n, n), Vector::Zero(m));
  }
};

/// Checks shared dimensions and finiteness; throws InputError on violation.
void validate_dimensions(const AdjacencyMatrix& A, const CovariateTensor& X,
                         const ModelParams& params);

/// Checks that every unmasked entry of A is admissible for the family
/// (Bernoulli: {0,1}; Poisson: non-negative integers). Throws InputError.
void validate_values(const AdjacencyMatrix& A, const Family& family);

}  // namespace lrem
