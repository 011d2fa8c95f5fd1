#include "lrem/glm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lrem/errors.hpp"

namespace lrem {

Matrix linear_predictor(const ModelParams& params, const CovariateTensor& X) {
  const Eigen::Index n = params.theta.rows();
  if (params.theta.cols() != n) {
    throw InputError("theta must be square on the node axis, got " +
                     std::to_string(params.theta.rows()) + "x" +
                     std::to_string(params.theta.cols()));
  }
  if (params.beta.size() != X.m()) {
    throw InputError("beta dimension mismatch on covariate axis: got " +
                     std::to_string(params.beta.size()) + ", expected " +
                     std::to_string(X.m()));
  }
  Matrix H = params.theta;
  for (Eigen::Index k = 0; k < X.m(); ++k) {
    const Matrix& Xk = X.matrices[static_cast<std::size_t>(k)];
    if (Xk.rows() != n || Xk.cols() != n) {
      throw InputError("covariate matrix X_" + std::to_string(k + 1) +
                       " dimension mismatch on node axis: got " +
                       std::to_string(Xk.rows()) + "x" +
                       std::to_string(Xk.cols()) + ", expected " +
                       std::to_string(n) + "x" + std::to_string(n));
    }
    H += params.beta(k) * Xk;
  }
  return H;
}

Matrix mean_matrix(const ModelParams& params, const CovariateTensor& X,
                   const Family& family, EvalCounters* counters) {
  Matrix H = linear_predictor(params, X);
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
      H(i, j) = family.mean(H(i, j), counters);
    }
  }
  return H;
}

namespace {

double masked_loglik_sum(const AdjacencyMatrix& A, const Matrix& H,
                         const Family& family, EvalCounters* counters) {
  double ll = 0.0;
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
      if (!A.mask(i, j)) continue;
      const double eta = H(i, j);
      ll += eta * A.values(i, j) - family.cumulant(eta, counters);
    }
  }
  return ll;
}

}  // namespace

double log_likelihood(const AdjacencyMatrix& A, const CovariateTensor& X,
                      const ModelParams& params, const Family& family,
                      EvalCounters* counters) {
  const Matrix H = linear_predictor(params, X);
  if (!H.allFinite()) {
    throw NumericError("non-finite linear predictor in log-likelihood");
  }
  return masked_loglik_sum(A, H, family, counters);
}

double log_likelihood_unchecked(const AdjacencyMatrix& A,
                                const CovariateTensor& X,
                                const ModelParams& params,
                                const Family& family, EvalCounters* counters) {
  const Matrix H = linear_predictor(params, X);
  if (!H.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  return masked_loglik_sum(A, H, family, counters);
}

Matrix grad_theta(const AdjacencyMatrix& A, const CovariateTensor& X,
                  const ModelParams& params, const Family& family,
                  EvalCounters* counters) {
  Matrix G = mean_matrix(params, X, family, counters);
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
      G(i, j) = A.mask(i, j) ? A.values(i, j) - G(i, j) : 0.0;
    }
  }
  return G;
}

Vector grad_beta(const AdjacencyMatrix& A, const CovariateTensor& X,
                 const ModelParams& params, const Family& family,
                 EvalCounters* counters) {
  const Matrix R = grad_theta(A, X, params, family, counters);
  Vector g(X.m());
  for (Eigen::Index k = 0; k < X.m(); ++k) {
    g(k) = X.matrices[static_cast<std::size_t>(k)].cwiseProduct(R).sum();
  }
  return g;
}

double lipschitz_bound(const ModelParams& params, const CovariateTensor& X,
                       const Family& family) {
  if (family.kind() == FamilyKind::BernoulliLogit) {
    return 1.0;
  }
  const double theta_max = params.theta.size() > 0
                               ? params.theta.cwiseAbs().maxCoeff()
                               : 0.0;
  double xb_max = 0.0;  // the empty covariate contraction is the zero matrix
  if (X.m() > 0) {
    Matrix C = params.beta(0) * X.matrices[0];
    for (Eigen::Index k = 1; k < X.m(); ++k) {
      C += params.beta(k) * X.matrices[static_cast<std::size_t>(k)];
    }
    xb_max = C.maxCoeff();
  }
  return std::exp(theta_max + xb_max);
}

}  // namespace lrem
