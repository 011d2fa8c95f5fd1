#include "lrem/types.hpp"

#include <cmath>
#include <string>

#include "lrem/errors.hpp"

namespace lrem {

void validate_dimensions(const AdjacencyMatrix& A, const CovariateTensor& X,
                         const ModelParams& params) {
  const Eigen::Index n = A.n();
  if (A.values.cols() != n) {
    throw InputError("adjacency matrix must be square, got " +
                     std::to_string(A.values.rows()) + "x" +
                     std::to_string(A.values.cols()));
  }
  if (A.mask.rows() != n || A.mask.cols() != n) {
    throw InputError("mask dimension mismatch on adjacency axis: mask is " +
                     std::to_string(A.mask.rows()) + "x" +
                     std::to_string(A.mask.cols()) + ", expected " +
                     std::to_string(n) + "x" + std::to_string(n));
  }
  for (std::size_t k = 0; k < X.matrices.size(); ++k) {
    const Matrix& Xk = X.matrices[k];
    if (Xk.rows() != n || Xk.cols() != n) {
      throw InputError("covariate matrix X_" + std::to_string(k + 1) +
                       " dimension mismatch on node axis: got " +
                       std::to_string(Xk.rows()) + "x" +
                       std::to_string(Xk.cols()) + ", expected " +
                       std::to_string(n) + "x" + std::to_string(n));
    }
  }
  if (params.theta.rows() != n || params.theta.cols() != n) {
    throw InputError("theta dimension mismatch on node axis: got " +
                     std::to_string(params.theta.rows()) + "x" +
                     std::to_string(params.theta.cols()) + ", expected " +
                     std::to_string(n) + "x" + std::to_string(n));
  }
  if (params.beta.size() != X.m()) {
    throw InputError("beta dimension mismatch on covariate axis: got " +
                     std::to_string(params.beta.size()) + ", expected " +
                     std::to_string(X.m()));
  }
  if (!A.values.allFinite() || !params.theta.allFinite() ||
      !params.beta.allFinite()) {
    throw InputError("non-finite entries in adjacency matrix or parameters");
  }
  for (const Matrix& Xk : X.matrices) {
    if (!Xk.allFinite()) {
      throw InputError("non-finite entries in covariate matrix");
    }
  }
}

void validate_values(const AdjacencyMatrix& A, const Family& family) {
  for (Eigen::Index j = 0; j < A.values.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.values.rows(); ++i) {
      if (!A.mask(i, j)) continue;
      const double a = A.values(i, j);
      if (!family.admissible_value(a)) {
        throw InputError(std::string("entry A(") + std::to_string(i) + "," +
                         std::to_string(j) + ")=" + std::to_string(a) +
                         " is not admissible for the " + family.name() +
                         " family");
      }
    }
  }
}

}  // namespace lrem
