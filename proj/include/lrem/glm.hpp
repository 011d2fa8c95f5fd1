#pragma once

#include "lrem/family.hpp"
#include "lrem/types.hpp"

namespace lrem {

/// Linear predictor H = Theta + sum_k beta_k X_k, accumulated in covariate
/// order k = 1..m into a copy of Theta.
Matrix linear_predictor(const ModelParams& params, const CovariateTensor& X);

/// Fitted mean P = L^{-1}(H), entrywise.
Matrix mean_matrix(const ModelParams& params, const CovariateTensor& X,
                   const Family& family, EvalCounters* counters = nullptr);

/// Log-likelihood sum over unmasked entries of eta_ij A_ij - b(eta_ij).
/// The parameter-free constant sum log c(A_ij) is dropped, so values are
/// comparable only within a run on fixed data.
double log_likelihood(const AdjacencyMatrix& A, const CovariateTensor& X,
                      const ModelParams& params, const Family& family,
                      EvalCounters* counters = nullptr);

/// Same sum, but a non-finite linear predictor yields a non-finite return
/// value instead of an exception — lets line searches reject an overshooting
/// trial step and retry smaller.
double log_likelihood_unchecked(const AdjacencyMatrix& A,
                                const CovariateTensor& X,
                                const ModelParams& params,
                                const Family& family,
                                EvalCounters* counters = nullptr);

/// Gradient of the log-likelihood in Theta: the residual A - P with masked
/// entries set to zero.
Matrix grad_theta(const AdjacencyMatrix& A, const CovariateTensor& X,
                  const ModelParams& params, const Family& family,
                  EvalCounters* counters = nullptr);

/// Gradient in beta: component k is tr(X_k^T (A - P)) over unmasked entries.
Vector grad_beta(const AdjacencyMatrix& A, const CovariateTensor& X,
                 const ModelParams& params, const Family& family,
                 EvalCounters* counters = nullptr);

/// Lipschitz bound K for the log-likelihood gradient on the current iterate:
/// 1 for the logit link, exp(max|theta_ij| + max_ij x_ij^T beta) for the
/// log link.
double lipschitz_bound(const ModelParams& params, const CovariateTensor& X,
                       const Family& family);

}  // namespace lrem
