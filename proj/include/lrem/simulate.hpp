#pragma once

#include <cstdint>

#include "lrem/family.hpp"
#include "lrem/types.hpp"

namespace lrem {

// Synthetic-network design: effects Theta = Z Z^T + alpha 11^T with
// Z ~ N(0,1)^{n x (r-1)}, two orthonormal edge covariates with
// beta = (c, -c), and conditionally independent edges from the family.
struct SimDesign {
  Eigen::Index n = 0;
  Eigen::Index r = 1;  // rank budget of the truth; Z has r-1 columns
  double alpha = 0.0;
  double c = 0.0;
  Family family = Family::bernoulli_logit();
  std::uint64_t seed = 0;
};

struct SimTruth {
  ModelParams params;  // Theta = ZZ^T + alpha 11^T, beta = (c, -c)
  CovariateTensor X;   // two orthonormal covariates
  Matrix P;            // inverse link of the linear predictor
};

// X = U V^T from the SVD of an n x n standard Gaussian draw; every singular
// value is 1, so the matrix is full rank with unit spectral norm.
Matrix orthonormal_covariate(Eigen::Index n, std::uint64_t seed);

// Builds the ground-truth parameters, covariates, and mean matrix for a
// design. Child seeds: stream 0 for Z, streams 1 and 2 for the covariates.
SimTruth generate_truth(const SimDesign& design);

// One independent draw per ordered entry (i, j) — a directed network even
// when P is symmetric. Row i consumes its own derived substream, so the
// result is independent of traversal order. Throws InputError when P is
// outside the family's mean range (Bernoulli: [0,1]; Poisson: finite,
// >= 0; boundary values are allowed and give deterministic entries).
AdjacencyMatrix sample_network(const Matrix& P, const Family& family,
                               std::uint64_t seed);

}  // namespace lrem
