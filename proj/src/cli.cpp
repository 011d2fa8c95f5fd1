#include "lrem/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <string>

#include "lrem/errors.hpp"
#include "lrem/evaluate.hpp"
#include "lrem/fit.hpp"
#include "lrem/glm.hpp"
#include "lrem/io.hpp"
#include "lrem/rng.hpp"
#include "lrem/simulate.hpp"
#include "lrem/spectral.hpp"

namespace lrem {

namespace {

namespace fs = std::filesystem;

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ';';
    out += parts[i];
  }
  return out;
}

std::string join_ll(const std::vector<long long>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_d(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ';';
    out += format_double(v[i]);
  }
  return out;
}

// Canonical flat view of the config: drives both the hash and the metadata
// record, so a run can be re-executed from its run_meta.json alone.
std::vector<std::pair<std::string, std::string>> flatten(
    const RunConfig& cfg) {
  return {
      {"alpha", format_double(cfg.alpha)},
      {"attrs", cfg.attrs_path},
      {"budgets", join_d(cfg.budgets)},
      {"c", format_double(cfg.c)},
      {"command", cfg.command},
      {"covariates", join(cfg.covariate_paths)},
      {"edges", cfg.edges_path},
      {"family", cfg.family},
      {"fraction", format_double(cfg.fraction)},
      {"gamma", format_double(cfg.gamma)},
      {"holdout", cfg.holdout},
      {"max_iter", std::to_string(cfg.max_iter)},
      {"method", cfg.method},
      {"n", std::to_string(cfg.n)},
      {"no_diagonal", cfg.no_diagonal ? "1" : "0"},
      {"out", cfg.out_dir},
      {"r", std::to_string(cfg.r)},
      {"R", format_double(cfg.R)},
      {"ranks", join_ll(cfg.ranks)},
      {"replicates", std::to_string(cfg.replicates)},
      {"s", std::to_string(cfg.s)},
      {"seed", std::to_string(cfg.seed)},
      {"step", cfg.step},
      {"symmetric", cfg.symmetric ? "1" : "0"},
      {"ties", cfg.ties},
      {"tol", format_double(cfg.tol)},
  };
}

void write_run_meta(const RunConfig& cfg) {
  nlohmann::json meta;
  std::string canonical;
  nlohmann::json flat;
  for (const auto& [key, value] : flatten(cfg)) {
    flat[key] = value;
    canonical += key;
    canonical += '=';
    canonical += value;
    canonical += '\n';
  }
  meta["command"] = cfg.command;
  meta["config"] = flat;
  meta["config_hash"] = fnv1a_hex(canonical);
  meta["gaussian_method"] = "marsaglia-polar";
  meta["rng"] = "mt19937_64";
  meta["seed"] = cfg.seed;
  meta["version"] = kVersion;
  write_file_atomic(fs::path(cfg.out_dir) / "run_meta.json",
                    meta.dump(2) + "\n");
}

Family family_of(const RunConfig& cfg) { return Family::parse(cfg.family); }

FitConfig fit_config_of(const RunConfig& cfg, bool with_constraints) {
  FitConfig fc;
  if (with_constraints) {
    fc.R = cfg.R;
    if (cfg.s >= 0) {
      if (cfg.s == 0) throw InputError("--s must be >= 1 when given");
      fc.s = static_cast<Eigen::Index>(cfg.s);
    }
  }
  if (cfg.step == "auto") {
    fc.step = StepPolicy::auto_step();
  } else if (cfg.step == "backtracking") {
    fc.step = StepPolicy::backtracking();
  } else if (cfg.step == "fixed") {
    if (!(cfg.gamma > 0)) {
      throw InputError("--step fixed requires --gamma > 0");
    }
    fc.step = StepPolicy::fixed(cfg.gamma);
  } else if (!cfg.step.empty()) {
    throw InputError("unknown step policy '" + cfg.step + "'");
  }
  if (cfg.max_iter < 1) throw InputError("--max-iter must be >= 1");
  fc.max_iter = static_cast<int>(cfg.max_iter);
  fc.tol = cfg.tol;
  return fc;
}

HoldoutUniverse universe_of(const RunConfig& cfg) {
  return cfg.holdout == "edges" ? HoldoutUniverse::Edges
                                : HoldoutUniverse::Entries;
}

TieMode ties_of(const RunConfig& cfg) {
  return cfg.ties == "half" ? TieMode::Half : TieMode::Zero;
}

struct LoadedData {
  AdjacencyMatrix A;
  CovariateTensor X;
  Family family;
};

LoadedData load_data(const RunConfig& cfg) {
  if (cfg.edges_path.empty()) throw InputError("--edges is required");
  if (cfg.n < 2) throw InputError("--n must be >= 2");
  LoadedData data{AdjacencyMatrix{}, CovariateTensor{}, family_of(cfg)};
  data.A = load_edge_list(cfg.edges_path, static_cast<Eigen::Index>(cfg.n),
                          cfg.symmetric);
  if (cfg.no_diagonal) data.A.exclude_diagonal();
  for (const auto& path : cfg.covariate_paths) {
    data.X.matrices.push_back(
        load_covariate_csv(path, static_cast<Eigen::Index>(cfg.n)));
  }
  validate_values(data.A, data.family);
  return data;
}

void write_fit_outputs(const RunConfig& cfg, const FitResult& res,
                       std::optional<Eigen::Index> s,
                       std::vector<std::pair<std::string, std::string>> extra =
                           {}) {
  const fs::path out(cfg.out_dir);
  save_params(out, res.params, s);
  write_trace_csv(out / "trace.csv", res.objective_trace);
  std::vector<std::pair<std::string, std::string>> metrics{
      {"objective", format_double(res.objective_trace.back())},
      {"iterations", std::to_string(res.iterations)},
      {"converged", res.converged ? "1" : "0"},
      {"clamp_events", std::to_string(res.clamp_events)},
      {"theta_nuclear_norm", format_double(nuclear_norm(res.params.theta))},
      {"theta_rank", std::to_string(numerical_rank(res.params.theta))},
  };
  metrics.insert(metrics.end(), extra.begin(), extra.end());
  write_metrics_csv(out / "metrics.csv", metrics);
}

int run_fit(const RunConfig& cfg) {
  const LoadedData data = load_data(cfg);
  const FitConfig fc = fit_config_of(cfg, true);
  const FitResult res = fit(data.A, data.X, data.family, fc);
  write_fit_outputs(cfg, res, fc.s);
  write_run_meta(cfg);
  return 0;
}

int run_grid_search(const RunConfig& cfg) {
  const LoadedData data = load_data(cfg);
  if (cfg.ranks.empty() || cfg.budgets.empty()) {
    throw InputError("--ranks and --budgets are required for grid-search");
  }
  TuningGrid grid;
  for (long long s : cfg.ranks) {
    if (s < 1) throw InputError("--ranks entries must be >= 1");
    grid.ranks.push_back(static_cast<Eigen::Index>(s));
  }
  grid.budgets = cfg.budgets;
  grid.validation_fraction = cfg.fraction;
  if (cfg.replicates < 1) throw InputError("--replicates must be >= 1");
  grid.replicates = static_cast<int>(cfg.replicates);
  grid.universe = universe_of(cfg);
  grid.ties = ties_of(cfg);

  const FitConfig base = fit_config_of(cfg, false);
  const GridSearchResult gr =
      grid_search(data.A, data.X, data.family, grid, base, cfg.seed);

  const fs::path out(cfg.out_dir);
  write_grid_csv(out / "grid.csv", gr.table);
  write_fit_outputs(cfg, gr.final_fit, gr.best_s,
                    {{"best_s", std::to_string(gr.best_s)},
                     {"best_R", format_double(gr.best_R)},
                     {"best_mean_auc", format_double(gr.best_mean_auc)}});
  write_run_meta(cfg);
  return 0;
}

int run_simulate(const RunConfig& cfg) {
  if (cfg.n < 2) throw InputError("--n must be >= 2");
  if (cfg.r < 1) throw InputError("--r must be >= 1");
  SimDesign design;
  design.n = static_cast<Eigen::Index>(cfg.n);
  design.r = static_cast<Eigen::Index>(cfg.r);
  design.alpha = cfg.alpha;
  design.c = cfg.c;
  design.family = family_of(cfg);
  design.seed = cfg.seed;

  const SimTruth truth = generate_truth(design);
  // Streams 0-2 generate the truth; stream 3 samples the network.
  const AdjacencyMatrix A =
      sample_network(truth.P, design.family, derive_seed(cfg.seed, 3));

  const fs::path out(cfg.out_dir);
  std::string edges;
  for (Eigen::Index i = 0; i < A.n(); ++i) {
    for (Eigen::Index j = 0; j < A.n(); ++j) {
      if (A.values(i, j) == 0.0) continue;
      edges += std::to_string(i);
      edges += '\t';
      edges += std::to_string(j);
      edges += '\t';
      edges += format_double(A.values(i, j));
      edges += '\n';
    }
  }
  write_file_atomic(out / "edges.tsv", edges);
  for (std::size_t k = 0; k < truth.X.matrices.size(); ++k) {
    write_matrix_csv(out / ("X" + std::to_string(k + 1) + ".csv"),
                     truth.X.matrices[k]);
  }
  write_matrix_csv(out / "P_true.csv", truth.P);
  write_matrix_csv(out / "theta_true.csv", truth.params.theta);
  write_vector_csv(out / "beta_true.csv", truth.params.beta);
  write_run_meta(cfg);
  return 0;
}

int run_evaluate(const RunConfig& cfg) {
  const LoadedData data = load_data(cfg);
  const FitConfig fc = fit_config_of(cfg, true);
  if (!(cfg.fraction > 0.0 && cfg.fraction < 1.0)) {
    throw InputError("--fraction must be in (0, 1)");
  }
  if (cfg.replicates < 1) throw InputError("--replicates must be >= 1");

  std::string rows = "replicate,auc,iterations,converged\n";
  std::vector<double> aucs;
  for (long long rep = 0; rep < cfg.replicates; ++rep) {
    const HoldoutSplit split =
        holdout_split(data.A, cfg.fraction,
                      derive_seed(cfg.seed, static_cast<std::uint64_t>(rep)),
                      universe_of(cfg));
    const FitResult res = fit(split.train, data.X, data.family, fc);
    const double auc =
        predictive_auc(data.A, res.mean, split.index_set, ties_of(cfg));
    aucs.push_back(auc);
    rows += std::to_string(rep);
    rows += ',';
    rows += format_double(auc);
    rows += ',';
    rows += std::to_string(res.iterations);
    rows += ',';
    rows += res.converged ? '1' : '0';
    rows += '\n';
  }

  double mean = 0.0;
  for (double a : aucs) mean += a;
  mean /= static_cast<double>(aucs.size());
  double sd = 0.0;
  if (aucs.size() > 1) {
    for (double a : aucs) sd += (a - mean) * (a - mean);
    sd = std::sqrt(sd / static_cast<double>(aucs.size() - 1));
  }

  const fs::path out(cfg.out_dir);
  write_file_atomic(out / "evaluation.csv", rows);
  write_metrics_csv(out / "metrics.csv",
                    {{"auc_mean", format_double(mean)},
                     {"auc_sd", format_double(sd)},
                     {"replicates", std::to_string(cfg.replicates)}});
  write_run_meta(cfg);
  return 0;
}

int run_convert_attrs(const RunConfig& cfg) {
  if (cfg.attrs_path.empty()) throw InputError("--attrs is required");
  if (cfg.n < 2) throw InputError("--n must be >= 2");
  const Matrix X =
      convert_node_attrs(cfg.attrs_path, static_cast<Eigen::Index>(cfg.n),
                         parse_attr_method(cfg.method));
  write_matrix_csv(fs::path(cfg.out_dir) / "covariate.csv", X);
  write_run_meta(cfg);
  return 0;
}

void report_error(int code, const char* type, const std::string& message) {
  nlohmann::json record;
  record["error"] = {
      {"exit_code", code}, {"type", type}, {"message", message}};
  std::cerr << record.dump() << std::endl;
}

}  // namespace

RunConfig parse_cli(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Low-rank effects GLM for network data"};
  app.set_config("--config", "",
                 "Flat key=value config file; command-line flags override");
  app.require_subcommand(1);

  // Options live on the parent so a flat config file covers all of them;
  // fallthrough routes flags written after the subcommand name back up.
  app.add_subcommand("fit", "Fit the model to a full network")->fallthrough();
  app.add_subcommand("grid-search",
                     "Select (s, R) by subsampling validation, then refit")
      ->fallthrough();
  app.add_subcommand("simulate", "Generate a synthetic network and truth")
      ->fallthrough();
  app.add_subcommand("evaluate",
                     "Hold-out AUC for one (R, s) over replicated splits")
      ->fallthrough();
  app.add_subcommand("convert-attrs",
                     "Turn node attributes into an edge covariate matrix")
      ->fallthrough();

  app.add_option("--edges", cfg.edges_path, "Edge list file (i j [weight])");
  app.add_option("--n", cfg.n, "Number of nodes")->capture_default_str();
  app.add_option("--covariate", cfg.covariate_paths,
                 "Dense n-by-n covariate CSV (repeatable, order preserved)");
  app.add_flag("--symmetric", cfg.symmetric,
               "Mirror edge list entries (undirected network)");
  app.add_flag("--no-diagonal", cfg.no_diagonal,
               "Exclude self-loops from the likelihood");
  app.add_option("--family", cfg.family, "bernoulli or poisson")
      ->capture_default_str();

  app.add_option("--R", cfg.R, "Nuclear-norm budget")->capture_default_str();
  app.add_option("--s", cfg.s, "Rank cap (omit for no cap)")
      ->capture_default_str();
  app.add_option("--step", cfg.step,
                 "Step policy: auto, backtracking, or fixed "
                 "(default: auto for bernoulli, backtracking for poisson)")
      ->check(CLI::IsMember({"auto", "backtracking", "fixed"}));
  app.add_option("--gamma", cfg.gamma, "Step size for --step fixed")
      ->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "Iteration cap")
      ->capture_default_str();
  app.add_option("--tol", cfg.tol, "Relative objective-change stop threshold")
      ->capture_default_str();

  app.add_option("--ranks", cfg.ranks, "Grid of s values (comma separated)")
      ->delimiter(',');
  app.add_option("--budgets", cfg.budgets,
                 "Grid of R values (comma separated)")
      ->delimiter(',');
  app.add_option("--fraction", cfg.fraction, "Hold-out fraction")
      ->capture_default_str();
  app.add_option("--replicates", cfg.replicates,
                 "Hold-out replicates per cell")
      ->capture_default_str();
  app.add_option("--holdout", cfg.holdout,
                 "Hold-out universe: entries (all) or edges (positives only)")
      ->check(CLI::IsMember({"entries", "edges"}))
      ->capture_default_str();
  app.add_option("--ties", cfg.ties,
                 "AUC tie handling: zero (literal formula) or half")
      ->check(CLI::IsMember({"zero", "half"}))
      ->capture_default_str();

  app.add_option("--r", cfg.r, "True effects rank for simulate")
      ->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "Intercept for simulate")
      ->capture_default_str();
  app.add_option("--c", cfg.c, "Covariate strength for simulate; beta=(c,-c)")
      ->capture_default_str();

  app.add_option("--attrs", cfg.attrs_path, "Node attribute file");
  app.add_option("--method", cfg.method,
                 "Attribute conversion: cocount-maxnorm or inner-product")
      ->check(CLI::IsMember({"cocount-maxnorm", "inner-product"}))
      ->capture_default_str();

  app.add_option("--seed", cfg.seed, "Base RNG seed")->capture_default_str();
  app.add_option("--out", cfg.out_dir, "Output directory")
      ->capture_default_str();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("lrem");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw InputError(e.what());
  }

  cfg.command = app.get_subcommands().front()->get_name();
  return cfg;
}

int run(const RunConfig& cfg) {
  try {
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.command == "fit") return run_fit(cfg);
    if (cfg.command == "grid-search") return run_grid_search(cfg);
    if (cfg.command == "simulate") return run_simulate(cfg);
    if (cfg.command == "evaluate") return run_evaluate(cfg);
    if (cfg.command == "convert-attrs") return run_convert_attrs(cfg);
    throw InputError("unknown command '" + cfg.command + "'");
  } catch (const AucUndefinedError& e) {
    report_error(4, "auc-undefined", e.what());
    return 4;
  } catch (const InputError& e) {
    report_error(2, "input", e.what());
    return 2;
  } catch (const NumericError& e) {
    report_error(3, "numeric", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    report_error(2, "input", e.what());
    return 2;
  }
}

int cli_main(int argc, char** argv) {
  RunConfig cfg;
  try {
    cfg = parse_cli(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const InputError& e) {
    report_error(2, "input", e.what());
    return 2;
  }
  return run(cfg);
}

}  // namespace lrem
