#pragma once

#include <string>
#include <vector>

namespace lrem {

inline constexpr const char* kVersion = "0.1.0";

// Everything an invocation needs, fully resolved from command line plus
// optional flat key=value config file (command line wins). All numeric
// fields hold their documented defaults until overridden.
struct RunConfig {
  std::string command;  // fit | grid-search | simulate | evaluate | convert-attrs

  // Data ingestion.
  std::string edges_path;
  long long n = 0;
  std::vector<std::string> covariate_paths;
  bool symmetric = false;
  bool no_diagonal = false;
  std::string family = "bernoulli";

  // Solver.
  double R = 0.0;
  long long s = -1;  // -1 = no rank cap
  std::string step;  // empty = family default; auto | backtracking | fixed
  double gamma = 1.0;
  long long max_iter = 500;
  double tol = 1e-6;

  // Hold-out evaluation and grid search.
  std::vector<long long> ranks;
  std::vector<double> budgets;
  double fraction = 0.2;
  long long replicates = 1;
  std::string holdout = "entries";  // entries | edges
  std::string ties = "zero";        // zero | half

  // Simulation.
  long long r = 2;
  double alpha = 0.0;
  double c = 0.0;

  // Attribute conversion.
  std::string attrs_path;
  std::string method = "cocount-maxnorm";

  // Common.
  unsigned long long seed = 0;
  std::string out_dir = ".";
};

// Raised when the user asked for --help; carries the text to print.
struct HelpRequested {
  std::string text;
};

// Parses argv-style arguments (program name excluded). Throws InputError
// on malformed arguments and HelpRequested for --help.
RunConfig parse_cli(const std::vector<std::string>& args);

// Executes one parsed command and writes its outputs under out_dir.
// Returns the exit code: 0 success, 2 input error, 3 numerical failure,
// 4 AUC undefined. Failures also emit a single-line JSON error record on
// stderr.
int run(const RunConfig& config);

// parse + run + error reporting; the entire main() body.
int cli_main(int argc, char** argv);

}  // namespace lrem
