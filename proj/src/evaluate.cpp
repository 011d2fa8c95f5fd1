#include "lrem/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "lrem/errors.hpp"
#include "lrem/rng.hpp"

namespace lrem {

HoldoutSplit holdout_split(const AdjacencyMatrix& A, double fraction,
                           std::uint64_t seed, HoldoutUniverse universe) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw InputError("holdout_split: fraction must be in [0, 1)");
  }

  std::vector<IndexPair> eligible;
  for (Eigen::Index i = 0; i < A.n(); ++i) {
    for (Eigen::Index j = 0; j < A.n(); ++j) {
      if (!A.mask(i, j)) continue;
      if (universe == HoldoutUniverse::Edges && !(A.values(i, j) > 0)) continue;
      eligible.emplace_back(i, j);
    }
  }

  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(eligible.size())));

  // Partial Fisher-Yates: the first `count` slots end up as a uniform
  // sample without replacement.
  Rng rng(seed);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t remaining = eligible.size() - t;
    const auto offset = static_cast<std::size_t>(
        rng.uniform01() * static_cast<double>(remaining));
    std::swap(eligible[t], eligible[t + std::min(offset, remaining - 1)]);
  }
  eligible.resize(count);

  HoldoutSplit split;
  split.train = A;
  split.index_set = std::move(eligible);
  split.seed = seed;
  for (const auto& [i, j] : split.index_set) split.train.values(i, j) = 0.0;
  return split;
}

double predictive_auc(const AdjacencyMatrix& A_eval, const Matrix& P_hat,
                      const std::vector<IndexPair>& index_set, TieMode ties) {
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> scored;
  scored.reserve(index_set.size());
  std::size_t zeros = 0, positives = 0;
  for (const auto& [i, j] : index_set) {
    const bool pos = A_eval.values(i, j) > 0;
    (pos ? positives : zeros) += 1;
    scored.push_back({P_hat(i, j), pos});
  }
  if (zeros == 0 || positives == 0) {
    throw AucUndefinedError(
        "AUC undefined: hold-out set has " + std::to_string(zeros) +
        " zero and " + std::to_string(positives) + " positive entries");
  }

  std::sort(scored.begin(), scored.end(),
            [](const Scored& a, const Scored& b) { return a.score < b.score; });

  // Walk tie groups in ascending score order; zeros strictly below the
  // group pair with every positive inside it.
  double hits = 0.0;
  std::size_t zeros_below = 0;
  std::size_t g = 0;
  while (g < scored.size()) {
    std::size_t h = g;
    std::size_t group_zeros = 0, group_pos = 0;
    while (h < scored.size() && scored[h].score == scored[g].score) {
      (scored[h].positive ? group_pos : group_zeros) += 1;
      ++h;
    }
    hits += static_cast<double>(zeros_below) * static_cast<double>(group_pos);
    if (ties == TieMode::Half) {
      hits += 0.5 * static_cast<double>(group_zeros) *
              static_cast<double>(group_pos);
    }
    zeros_below += group_zeros;
    g = h;
  }
  return hits /
         (static_cast<double>(zeros) * static_cast<double>(positives));
}

double rmse(const Matrix& P_hat, const Matrix& P_true) {
  if (P_hat.rows() != P_true.rows() || P_hat.cols() != P_true.cols()) {
    throw InputError("rmse: shape mismatch");
  }
  const double denom = P_true.norm();
  if (denom == 0.0) {
    throw InputError("rmse: reference matrix has zero Frobenius norm");
  }
  return (P_hat - P_true).norm() / denom;
}

namespace {

std::vector<Eigen::Index> sorted_unique(std::vector<Eigen::Index> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

GridSearchResult grid_search(const AdjacencyMatrix& A,
                             const CovariateTensor& X, const Family& family,
                             const TuningGrid& grid,
                             const FitConfig& fit_config_base,
                             std::uint64_t seed) {
  if (grid.ranks.empty() || grid.budgets.empty()) {
    throw InputError("grid_search: ranks and budgets must be non-empty");
  }
  if (!(grid.validation_fraction > 0.0 && grid.validation_fraction < 1.0)) {
    throw InputError("grid_search: validation_fraction must be in (0, 1)");
  }
  if (grid.replicates < 1) {
    throw InputError("grid_search: replicates must be >= 1");
  }

  const auto ranks = sorted_unique(grid.ranks);
  const auto budgets = sorted_unique(grid.budgets);

  // One split per replicate, shared by every (s, R) cell.
  std::vector<HoldoutSplit> splits;
  splits.reserve(static_cast<std::size_t>(grid.replicates));
  for (int rep = 0; rep < grid.replicates; ++rep) {
    splits.push_back(holdout_split(A, grid.validation_fraction,
                                   derive_seed(seed, static_cast<std::uint64_t>(rep)),
                                   grid.universe));
  }

  std::vector<GridCell> table(ranks.size() * budgets.size() *
                              static_cast<std::size_t>(grid.replicates));
  for (std::size_t si = 0; si < ranks.size(); ++si) {
    for (std::size_t ri = 0; ri < budgets.size(); ++ri) {
      for (int rep = 0; rep < grid.replicates; ++rep) {
        auto& cell = table[(si * budgets.size() + ri) *
                               static_cast<std::size_t>(grid.replicates) +
                           static_cast<std::size_t>(rep)];
        cell.s = ranks[si];
        cell.R = budgets[ri];
        cell.replicate = rep;
        cell.auc = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= table.size()) return;
      GridCell& cell = table[idx];
      const HoldoutSplit& split =
          splits[static_cast<std::size_t>(cell.replicate)];
      try {
        FitConfig config = fit_config_base;
        config.R = cell.R;
        config.s = cell.s;
        const FitResult res = fit(split.train, X, family, config);
        cell.iterations = res.iterations;
        cell.converged = res.converged;
        cell.auc = predictive_auc(A, res.mean, split.index_set, grid.ties);
      } catch (const std::exception&) {
        // NaN already marks the failure; the cell stays in the table so the
        // emitted CSV shows the hole.
      }
    }
  };

  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min(hw, table.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  GridSearchResult result;
  result.best_mean_auc = -std::numeric_limits<double>::infinity();
  bool any_cell = false;
  for (std::size_t si = 0; si < ranks.size(); ++si) {
    for (std::size_t ri = 0; ri < budgets.size(); ++ri) {
      double sum = 0.0;
      int valid = 0;
      for (int rep = 0; rep < grid.replicates; ++rep) {
        const auto& cell = table[(si * budgets.size() + ri) *
                                     static_cast<std::size_t>(grid.replicates) +
                                 static_cast<std::size_t>(rep)];
        if (std::isfinite(cell.auc)) {
          sum += cell.auc;
          ++valid;
        }
      }
      if (valid == 0) continue;
      any_cell = true;
      const double mean = sum / valid;
      // Strict > plus ascending iteration order breaks ties toward the
      // smaller s, then the smaller R.
      if (mean > result.best_mean_auc) {
        result.best_mean_auc = mean;
        result.best_s = ranks[si];
        result.best_R = budgets[ri];
      }
    }
  }
  if (!any_cell) {
    throw AucUndefinedError(
        "grid_search: every cell failed; no validation AUC is defined");
  }

  FitConfig best = fit_config_base;
  best.R = result.best_R;
  best.s = result.best_s;
  result.final_fit = fit(A, X, family, best);
  result.table = std::move(table);
  return result;
}

}  // namespace lrem
