#include "lrem/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "lrem/errors.hpp"
#include "lrem/spectral.hpp"

namespace lrem {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : line) {
    if (ch == ',' || ch == '\t' || ch == ' ') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

[[noreturn]] void line_error(const std::filesystem::path& path, int line,
                             const std::string& what) {
  throw InputError(path.string() + ":" + std::to_string(line) + ": " + what);
}

long long parse_int(const std::string& token, const std::filesystem::path& path,
                    int line, const char* what) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(token.c_str(), &end, 10);
  if (errno != 0 || end != token.c_str() + token.size() || token.empty()) {
    line_error(path, line, std::string("cannot parse ") + what + " '" + token +
                               "' as an integer");
  }
  return v;
}

double parse_real(const std::string& token, const std::filesystem::path& path,
                  int line, const char* what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (errno == ERANGE || end != token.c_str() + token.size() ||
      token.empty()) {
    line_error(path, line, std::string("cannot parse ") + what + " '" + token +
                               "' as a number");
  }
  return v;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path.string());
  return in;
}

// Reads non-blank, non-comment lines with their 1-based line numbers.
std::vector<std::pair<int, std::string>> data_lines(
    const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  std::vector<std::pair<int, std::string>> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string::npos || raw[first] == '#') continue;
    lines.emplace_back(number, raw);
  }
  return lines;
}

}  // namespace

AdjacencyMatrix load_edge_list(const std::filesystem::path& path,
                               Eigen::Index n, bool symmetric) {
  if (n < 1) throw InputError("load_edge_list: n must be >= 1");

  struct PairAgg {
    double sum = 0.0;
    int first_line = 0;
  };
  std::map<std::pair<Eigen::Index, Eigen::Index>, PairAgg> agg;

  for (const auto& [number, line] : data_lines(path)) {
    const auto tokens = tokenize(line);
    if (tokens.size() != 2 && tokens.size() != 3) {
      line_error(path, number,
                 "expected 'i j [weight]', got " +
                     std::to_string(tokens.size()) + " fields");
    }
    const long long i = parse_int(tokens[0], path, number, "node id");
    const long long j = parse_int(tokens[1], path, number, "node id");
    if (i < 0 || i >= n || j < 0 || j >= n) {
      line_error(path, number,
                 "node id out of range [0, " + std::to_string(n) + "): (" +
                     std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    double w = 1.0;
    if (tokens.size() == 3) {
      w = parse_real(tokens[2], path, number, "weight");
      if (!std::isfinite(w)) line_error(path, number, "non-finite weight");
      if (w < 0) {
        line_error(path, number,
                   "negative weight " + tokens[2] +
                       " (admissible edge values are non-negative)");
      }
    }
    auto& cell = agg[{static_cast<Eigen::Index>(i),
                      static_cast<Eigen::Index>(j)}];
    if (cell.first_line == 0) cell.first_line = number;
    cell.sum += w;
  }

  Matrix A = Matrix::Zero(n, n);
  if (!symmetric) {
    for (const auto& [key, cell] : agg) A(key.first, key.second) = cell.sum;
    return AdjacencyMatrix(std::move(A));
  }

  for (const auto& [key, cell] : agg) {
    const auto [i, j] = key;
    if (i == j) {
      A(i, i) = cell.sum;
      continue;
    }
    const auto mirror = agg.find({j, i});
    if (mirror != agg.end()) {
      if (i > j) continue;  // handled when visiting (min, max)
      if (mirror->second.sum != cell.sum) {
        throw InputError(
            path.string() + ": symmetric network lists (" + std::to_string(i) +
            "," + std::to_string(j) + ") with total weight " +
            format_double(cell.sum) + " (line " +
            std::to_string(cell.first_line) + ") but (" + std::to_string(j) +
            "," + std::to_string(i) + ") with total weight " +
            format_double(mirror->second.sum) + " (line " +
            std::to_string(mirror->second.first_line) + ")");
      }
    }
    A(i, j) = cell.sum;
    A(j, i) = cell.sum;
  }
  return AdjacencyMatrix(std::move(A));
}

Matrix load_covariate_csv(const std::filesystem::path& path, Eigen::Index n) {
  const auto lines = data_lines(path);
  if (static_cast<Eigen::Index>(lines.size()) != n) {
    throw InputError(path.string() + ": expected " + std::to_string(n) +
                     " rows, found " + std::to_string(lines.size()));
  }
  Matrix X(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& [number, line] = lines[static_cast<std::size_t>(r)];
    const auto tokens = tokenize(line);
    if (static_cast<Eigen::Index>(tokens.size()) != n) {
      line_error(path, number,
                 "expected " + std::to_string(n) + " values, found " +
                     std::to_string(tokens.size()));
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      X(r, c) = parse_real(tokens[static_cast<std::size_t>(c)], path, number,
                           "matrix entry");
    }
  }
  return X;
}

AttrMethod parse_attr_method(const std::string& name) {
  if (name == "cocount-maxnorm") return AttrMethod::CocountMaxnorm;
  if (name == "inner-product") return AttrMethod::InnerProduct;
  throw InputError("unknown attribute conversion method '" + name +
                   "' (expected cocount-maxnorm or inner-product)");
}

namespace {

Matrix attrs_cocount(const std::filesystem::path& path, Eigen::Index n) {
  std::vector<std::set<std::string>> items(static_cast<std::size_t>(n));
  for (const auto& [number, line] : data_lines(path)) {
    const auto tokens = tokenize(line);
    if (tokens.size() != 2) {
      line_error(path, number,
                 "expected 'node_id item_id', got " +
                     std::to_string(tokens.size()) + " fields");
    }
    const long long id = parse_int(tokens[0], path, number, "node id");
    if (id < 0 || id >= n) {
      line_error(path, number,
                 "node id " + std::to_string(id) + " out of range [0, " +
                     std::to_string(n) + ")");
    }
    items[static_cast<std::size_t>(id)].insert(tokens[1]);
  }

  Matrix counts = Matrix::Zero(n, n);
  double max_count = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = items[static_cast<std::size_t>(i)];
      const auto& b = items[static_cast<std::size_t>(j)];
      const auto& small = a.size() <= b.size() ? a : b;
      const auto& large = a.size() <= b.size() ? b : a;
      double shared = 0.0;
      for (const auto& item : small) {
        if (large.count(item)) shared += 1.0;
      }
      counts(i, j) = shared;
      counts(j, i) = shared;
      max_count = std::max(max_count, shared);
    }
  }
  if (max_count == 0.0) {
    throw InputError(path.string() +
                     ": every off-diagonal co-count is zero; the "
                     "max-normalized covariate is undefined");
  }
  return counts / max_count;
}

Matrix attrs_inner_product(const std::filesystem::path& path, Eigen::Index n) {
  std::vector<Vector> vectors(static_cast<std::size_t>(n));
  Eigen::Index dim = -1;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& [number, line] : data_lines(path)) {
    const auto tokens = tokenize(line);
    if (tokens.size() < 2) {
      line_error(path, number, "expected 'node_id v1,...,vd'");
    }
    const long long id = parse_int(tokens[0], path, number, "node id");
    if (id < 0 || id >= n) {
      line_error(path, number,
                 "node id " + std::to_string(id) + " out of range [0, " +
                     std::to_string(n) + ")");
    }
    if (seen[static_cast<std::size_t>(id)]) {
      line_error(path, number,
                 "duplicate attribute vector for node " + std::to_string(id));
    }
    seen[static_cast<std::size_t>(id)] = true;
    const auto d = static_cast<Eigen::Index>(tokens.size()) - 1;
    if (dim == -1) dim = d;
    if (d != dim) {
      line_error(path, number,
                 "vector has " + std::to_string(d) + " components, expected " +
                     std::to_string(dim));
    }
    Vector v(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      v(k) = parse_real(tokens[static_cast<std::size_t>(k) + 1], path, number,
                        "vector component");
    }
    vectors[static_cast<std::size_t>(id)] = std::move(v);
  }
  if (dim == -1) {
    throw InputError(path.string() + ": no attribute vectors found");
  }
  for (auto& v : vectors) {
    if (v.size() == 0) v = Vector::Zero(dim);
  }
  Matrix X(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      X(i, j) = vectors[static_cast<std::size_t>(i)].dot(
          vectors[static_cast<std::size_t>(j)]);
    }
  }
  return X;
}

}  // namespace

Matrix convert_node_attrs(const std::filesystem::path& path, Eigen::Index n,
                          AttrMethod method) {
  if (n < 1) throw InputError("convert_node_attrs: n must be >= 1");
  return method == AttrMethod::CocountMaxnorm ? attrs_cocount(path, n)
                                              : attrs_inner_product(path, n);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.good()) throw InputError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(M(i, j));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const auto lines = data_lines(path);
  const auto rows = static_cast<Eigen::Index>(lines.size());
  if (rows == 0) return Matrix(0, 0);
  Eigen::Index cols = -1;
  Matrix M;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& [number, line] = lines[static_cast<std::size_t>(r)];
    const auto tokens = tokenize(line);
    if (cols == -1) {
      cols = static_cast<Eigen::Index>(tokens.size());
      M.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(tokens.size()) != cols) {
      line_error(path, number, "ragged row in matrix CSV");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      M(r, c) = parse_real(tokens[static_cast<std::size_t>(c)], path, number,
                           "matrix entry");
    }
  }
  return M;
}

void write_vector_csv(const std::filesystem::path& path, const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += format_double(v(i));
    out += '\n';
  }
  write_file_atomic(path, out);
}

Vector read_vector_csv(const std::filesystem::path& path) {
  const auto lines = data_lines(path);
  Vector v(static_cast<Eigen::Index>(lines.size()));
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto& [number, line] = lines[r];
    const auto tokens = tokenize(line);
    if (tokens.size() != 1) line_error(path, number, "expected one value");
    v(static_cast<Eigen::Index>(r)) =
        parse_real(tokens[0], path, number, "value");
  }
  return v;
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<double>& trace) {
  std::string out = "iteration,objective\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += format_double(trace[t]);
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_metrics_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = "metric,value\n";
  for (const auto& [key, value] : rows) {
    out += key;
    out += ',';
    out += value;
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_grid_csv(const std::filesystem::path& path,
                    const std::vector<GridCell>& table) {
  std::string out = "s,R,replicate,auc,iterations,converged\n";
  for (const auto& cell : table) {
    out += std::to_string(cell.s);
    out += ',';
    out += format_double(cell.R);
    out += ',';
    out += std::to_string(cell.replicate);
    out += ',';
    out += format_double(cell.auc);
    out += ',';
    out += std::to_string(cell.iterations);
    out += ',';
    out += cell.converged ? '1' : '0';
    out += '\n';
  }
  write_file_atomic(path, out);
}

void save_params(const std::filesystem::path& dir, const ModelParams& params,
                 std::optional<Eigen::Index> s) {
  const SvdFactors f = svd(params.theta);
  const Eigen::Index n = params.theta.rows();
  Eigen::Index keep = s ? std::min(*s, n) : n;
  // Trim trailing singular values that contribute nothing at the target
  // reconstruction accuracy, but always keep one triplet so the files have
  // well-defined shapes even for Theta = 0.
  const double floor = 1e-14 * (f.sigma.size() > 0 ? f.sigma(0) : 0.0);
  while (keep > 1 && f.sigma(keep - 1) <= floor) --keep;

  write_matrix_csv(dir / "params_theta_U.csv", f.U.leftCols(keep));
  write_matrix_csv(dir / "params_theta_V.csv", f.V.leftCols(keep));
  write_vector_csv(dir / "params_theta_sigma.csv", f.sigma.head(keep));
  write_vector_csv(dir / "params_beta.csv", params.beta);
}

ModelParams load_params(const std::filesystem::path& dir) {
  const Matrix U = read_matrix_csv(dir / "params_theta_U.csv");
  const Matrix V = read_matrix_csv(dir / "params_theta_V.csv");
  const Vector sigma = read_vector_csv(dir / "params_theta_sigma.csv");
  if (U.cols() != sigma.size() || V.cols() != sigma.size() ||
      U.rows() != V.rows()) {
    throw InputError("inconsistent factored parameter files in " +
                     dir.string());
  }
  ModelParams params;
  params.theta = U * sigma.asDiagonal() * V.transpose();
  params.beta = read_vector_csv(dir / "params_beta.csv");
  return params;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lrem
