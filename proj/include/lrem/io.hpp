#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrem/evaluate.hpp"
#include "lrem/types.hpp"

namespace lrem {

// Edge list ingestion: tab-, comma-, or space-separated `i j [weight]`
// rows with 0-based integer node ids, weight defaulting to 1. Lines
// starting with '#' and blank lines are skipped. Duplicate (i, j) rows
// sum. With symmetric=true each pair is mirrored, and listing both
// directions with different totals is an error. All malformed-input
// errors carry the offending line number.
AdjacencyMatrix load_edge_list(const std::filesystem::path& path,
                               Eigen::Index n, bool symmetric);

// Dense n x n covariate matrix from CSV (n rows, n values each).
Matrix load_covariate_csv(const std::filesystem::path& path, Eigen::Index n);

enum class AttrMethod { CocountMaxnorm, InnerProduct };
AttrMethod parse_attr_method(const std::string& name);

// Node-attribute file -> n x n edge covariate.
//  - cocount-maxnorm: rows `node_id item_id`; X_ij = |items_i ∩ items_j|
//    normalized by the off-diagonal maximum, diagonal forced to 0. Errors
//    when every off-diagonal co-count is zero.
//  - inner-product: rows `node_id v1,...,vd`; X_ij = <v_i, v_j> including
//    the diagonal. Nodes absent from the file get the zero vector.
Matrix convert_node_attrs(const std::filesystem::path& path, Eigen::Index n,
                          AttrMethod method);

// 17-significant-digit formatting so every double round-trips exactly
// through text.
std::string format_double(double x);

// Writes content to a temporary file in the target directory, then renames
// it into place, so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& M);
Matrix read_matrix_csv(const std::filesystem::path& path);

// One value per line.
void write_vector_csv(const std::filesystem::path& path, const Vector& v);
Vector read_vector_csv(const std::filesystem::path& path);

// `iteration,objective` rows, iteration 0 being the initial point.
void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<double>& trace);

// `metric,value` rows.
void write_metrics_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& rows);

// `s,R,replicate,auc,iterations,converged` rows (converged as 1/0).
void write_grid_csv(const std::filesystem::path& path,
                    const std::vector<GridCell>& table);

// Persists (Theta, beta) with Theta in factored form U, sigma, V (files
// params_theta_U.csv / params_theta_sigma.csv / params_theta_V.csv plus
// params_beta.csv). The kept rank is s when given, otherwise the count of
// singular values above 1e-14 * sigma_1 — tight enough that the
// reconstructed mean matrix matches to ~1e-10.
void save_params(const std::filesystem::path& dir, const ModelParams& params,
                 std::optional<Eigen::Index> s);
ModelParams load_params(const std::filesystem::path& dir);

// 64-bit FNV-1a, hex-encoded; used to fingerprint the run configuration.
std::string fnv1a_hex(const std::string& data);

}  // namespace lrem
