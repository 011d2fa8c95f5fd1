#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lrem/family.hpp"
#include "lrem/fit.hpp"
#include "lrem/types.hpp"

namespace lrem {

using IndexPair = std::pair<Eigen::Index, Eigen::Index>;

// Which entries are eligible for holding out: every unmasked entry, or only
// the positive ones (two readings of the same protocol; entries is the
// default, edges is opt-in).
enum class HoldoutUniverse { Entries, Edges };

// Tied scores in the AUC: count 0 (the literal pair-counting formula,
// default) or 0.5 (the conventional rank-statistic treatment).
enum class TieMode { Zero, Half };

struct HoldoutSplit {
  AdjacencyMatrix train;  // original A with held-out entries set to 0
  std::vector<IndexPair> index_set;
  std::uint64_t seed = 0;
};

// Zeroes out round(fraction * #eligible) entries chosen uniformly without
// replacement. The zeroed entries stay unmasked — they participate in the
// training likelihood as observed zeros, which is the point of the
// protocol (and its known caveat).
HoldoutSplit holdout_split(const AdjacencyMatrix& A, double fraction,
                           std::uint64_t seed,
                           HoldoutUniverse universe = HoldoutUniverse::Entries);

// P(zero-entry score < positive-entry score) over all (zero, positive)
// pairs drawn from index_set, scored by P_hat and labeled by A_eval
// (positive means A_ij > 0). Ties contribute per `ties`. O(k log k) via a
// single sort; exactly equal to the brute-force double loop. Throws
// AucUndefinedError when index_set lacks a zero or a positive entry.
double predictive_auc(const AdjacencyMatrix& A_eval, const Matrix& P_hat,
                      const std::vector<IndexPair>& index_set,
                      TieMode ties = TieMode::Zero);

// Relative error ||P_hat - P_true||_F / ||P_true||_F.
double rmse(const Matrix& P_hat, const Matrix& P_true);

struct TuningGrid {
  std::vector<Eigen::Index> ranks;  // s values
  std::vector<double> budgets;      // R values
  double validation_fraction = 0.2;
  int replicates = 1;
  HoldoutUniverse universe = HoldoutUniverse::Entries;
  TieMode ties = TieMode::Zero;
};

struct GridCell {
  Eigen::Index s = 0;
  double R = 0.0;
  int replicate = 0;
  double auc = 0.0;  // NaN when the cell failed
  int iterations = 0;
  bool converged = false;
};

struct GridSearchResult {
  Eigen::Index best_s = 0;
  double best_R = 0.0;
  double best_mean_auc = 0.0;
  std::vector<GridCell> table;  // sorted by (s, R, replicate)
  FitResult final_fit;          // refit on the full matrix at the best cell
};

// Subsampling validation over the (s, R) grid. Replicate t of every cell
// shares one hold-out split (seed derived from the base seed and t), so
// cells compete on identical data. Cells run in parallel; the table is
// assembled in (s, R, replicate) order regardless of completion order.
// A cell whose fit fails numerically records auc = NaN and is excluded
// from that cell's mean. Best cell = argmax mean AUC, ties broken toward
// smaller s then smaller R; throws when every cell fails.
GridSearchResult grid_search(const AdjacencyMatrix& A,
                             const CovariateTensor& X, const Family& family,
                             const TuningGrid& grid,
                             const FitConfig& fit_config_base,
                             std::uint64_t seed);

}  // namespace lrem
