#include "cgcn/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cgcn/error.hpp"
#include "cgcn/kernels.hpp"

namespace cgcn {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw InputError("DenseMatrix: expected " + std::to_string(rows * cols) + " values, got " +
                     std::to_string(values_.size()));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<Index>(c));
  if (it == cols.end() || *it != static_cast<Index>(c)) return 0.0;
  return values[row_offsets[r] + (it - cols.begin())];
}

SparseMatrix SparseMatrix::zeros(std::size_t rows, std::size_t cols) {
  SparseMatrix m;
  m.n_rows = rows;
  m.n_cols = cols;
  m.row_offsets.assign(rows + 1, 0);
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m;
  m.n_rows = m.n_cols = n;
  m.row_offsets.resize(n + 1);
  m.col_indices.resize(n);
  m.values.assign(n, 1.0);
  for (std::size_t i = 0; i <= n; ++i) m.row_offsets[i] = static_cast<std::int64_t>(i);
  for (std::size_t i = 0; i < n; ++i) m.col_indices[i] = static_cast<Index>(i);
  return m;
}

void SparseMatrix::validate() const {
  if (row_offsets.size() != n_rows + 1 || row_offsets.front() != 0) {
    throw InputError("SparseMatrix: row_offsets must have n_rows+1 entries starting at 0");
  }
  if (static_cast<std::size_t>(row_offsets.back()) != col_indices.size() ||
      col_indices.size() != values.size()) {
    throw InputError("SparseMatrix: row_offsets, col_indices and values disagree in length");
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (row_offsets[r + 1] < row_offsets[r]) {
      throw InputError("SparseMatrix: row_offsets decrease at row " + std::to_string(r));
    }
    const auto cols = row_cols(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] < 0 || static_cast<std::size_t>(cols[k]) >= n_cols) {
        throw InputError("SparseMatrix: column index out of range in row " + std::to_string(r));
      }
      if (k > 0 && cols[k] <= cols[k - 1]) {
        throw InputError("SparseMatrix: columns not strictly increasing in row " +
                         std::to_string(r));
      }
    }
  }
}

NormMode parse_norm_mode(std::string_view s) {
  if (s == "row") return NormMode::kRow;
  if (s == "sym") return NormMode::kSym;
  throw InputError("unknown normalization mode '" + std::string(s) + "' (expected row|sym)");
}

std::string_view to_string(NormMode m) { return m == NormMode::kRow ? "row" : "sym"; }

SparseMatrix from_edges(std::span<const Edge> edges, std::size_t n) {
  std::vector<Edge> pairs;
  pairs.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
      throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") references a node outside [0," + std::to_string(n) + ")");
    }
    if (u == v) continue;
    pairs.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<std::int64_t> degree(n, 0);
  for (const auto& [u, v] : pairs) {
    ++degree[u];
    ++degree[v];
  }
  SparseMatrix m;
  m.n_rows = m.n_cols = n;
  m.row_offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) m.row_offsets[i + 1] = m.row_offsets[i] + degree[i];
  m.col_indices.resize(static_cast<std::size_t>(m.row_offsets[n]));
  m.values.assign(m.col_indices.size(), 1.0);
  std::vector<std::int64_t> cursor(m.row_offsets.begin(), m.row_offsets.end() - 1);
  for (const auto& [u, v] : pairs) {
    m.col_indices[cursor[u]++] = v;
    m.col_indices[cursor[v]++] = u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(m.col_indices.begin() + m.row_offsets[i], m.col_indices.begin() + m.row_offsets[i + 1]);
  }
  return m;
}

namespace {

void require_square(const SparseMatrix& a, const char* op) {
  if (a.n_rows != a.n_cols) {
    throw InputError(std::string(op) + ": matrix is " + std::to_string(a.n_rows) + "x" +
                     std::to_string(a.n_cols) + ", expected square");
  }
}

// A + I with the diagonal merged into existing entries.
SparseMatrix add_identity(const SparseMatrix& a) {
  SparseMatrix m;
  m.n_rows = m.n_cols = a.n_rows;
  m.row_offsets.assign(a.n_rows + 1, 0);
  m.col_indices.reserve(a.nnz() + a.n_rows);
  m.values.reserve(a.nnz() + a.n_rows);
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_vals(r);
    bool placed = false;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto c = static_cast<std::size_t>(cols[k]);
      if (!placed && c >= r) {
        if (c == r) {
          m.col_indices.push_back(cols[k]);
          m.values.push_back(vals[k] + 1.0);
          placed = true;
          continue;
        }
        m.col_indices.push_back(static_cast<Index>(r));
        m.values.push_back(1.0);
        placed = true;
      }
      m.col_indices.push_back(cols[k]);
      m.values.push_back(vals[k]);
    }
    if (!placed) {
      m.col_indices.push_back(static_cast<Index>(r));
      m.values.push_back(1.0);
    }
    m.row_offsets[r + 1] = static_cast<std::int64_t>(m.col_indices.size());
  }
  return m;
}

}  // namespace

SparseMatrix row_normalize_aug(const SparseMatrix& a) {
  require_square(a, "row_normalize_aug");
  SparseMatrix m = add_identity(a);
  for (std::size_t r = 0; r < m.n_rows; ++r) {
    // Degree of the original matrix, i.e. its row sum; +1 for the added loop.
    double degree = 0.0;
    for (double v : a.row_vals(r)) degree += v;
    const double inv = 1.0 / (degree + 1.0);
    for (auto k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) m.values[k] *= inv;
  }
  return m;
}

SparseMatrix sym_normalize_aug(const SparseMatrix& a) {
  require_square(a, "sym_normalize_aug");
  SparseMatrix m = add_identity(a);
  std::vector<double> inv_sqrt(m.n_rows);
  for (std::size_t r = 0; r < m.n_rows; ++r) {
    double degree = 0.0;
    for (double v : m.row_vals(r)) degree += v;
    inv_sqrt[r] = 1.0 / std::sqrt(degree);
  }
  for (std::size_t r = 0; r < m.n_rows; ++r) {
    for (auto k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      m.values[k] = inv_sqrt[r] * m.values[k] * inv_sqrt[m.col_indices[k]];
    }
  }
  return m;
}

SparseMatrix normalize(const SparseMatrix& a, NormMode mode) {
  return mode == NormMode::kRow ? row_normalize_aug(a) : sym_normalize_aug(a);
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) { return kernels::spmm(a, x); }

SparseMatrix extract_submatrix(const SparseMatrix& a, std::span<const Index> nodes) {
  std::vector<Index> local(a.n_rows, -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Index g = nodes[i];
    if (g < 0 || static_cast<std::size_t>(g) >= a.n_rows) {
      throw InputError("extract_submatrix: node " + std::to_string(g) + " out of range");
    }
    if (local[g] != -1) {
      throw InputError("extract_submatrix: node " + std::to_string(g) + " listed twice");
    }
    local[g] = static_cast<Index>(i);
  }
  SparseMatrix m;
  m.n_rows = m.n_cols = nodes.size();
  m.row_offsets.assign(nodes.size() + 1, 0);
  std::vector<std::pair<Index, double>> row;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    row.clear();
    const auto cols = a.row_cols(nodes[i]);
    const auto vals = a.row_vals(nodes[i]);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index l = local[cols[k]];
      if (l >= 0) row.emplace_back(l, vals[k]);
    }
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      m.col_indices.push_back(c);
      m.values.push_back(v);
    }
    m.row_offsets[i + 1] = static_cast<std::int64_t>(m.col_indices.size());
  }
  return m;
}

SparseMatrix transpose(const SparseMatrix& a) {
  SparseMatrix t;
  t.n_rows = a.n_cols;
  t.n_cols = a.n_rows;
  t.row_offsets.assign(a.n_cols + 1, 0);
  for (Index c : a.col_indices) ++t.row_offsets[c + 1];
  for (std::size_t i = 0; i < a.n_cols; ++i) t.row_offsets[i + 1] += t.row_offsets[i];
  t.col_indices.resize(a.nnz());
  t.values.resize(a.nnz());
  std::vector<std::int64_t> cursor(t.row_offsets.begin(), t.row_offsets.end() - 1);
  // Rows visited in ascending order keep each transposed row sorted.
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (auto k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      const auto dst = cursor[a.col_indices[k]]++;
      t.col_indices[dst] = static_cast<Index>(r);
      t.values[dst] = a.values[k];
    }
  }
  return t;
}

SparseMatrix add_scaled_diagonal(const SparseMatrix& a, double scale) {
  SparseMatrix m = a;
  for (std::size_t r = 0; r < std::min(m.n_rows, m.n_cols); ++r) {
    for (auto k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      if (static_cast<std::size_t>(m.col_indices[k]) == r) m.values[k] += scale * m.values[k];
    }
  }
  return m;
}

DenseMatrix to_dense(const SparseMatrix& a) {
  DenseMatrix d(a.n_rows, a.n_cols);
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_vals(r);
    for (std::size_t k = 0; k < cols.size(); ++k) d(r, cols[k]) = vals[k];
  }
  return d;
}

std::size_t undirected_edge_count(const SparseMatrix& a) {
  std::size_t loops = 0;
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (Index c : a.row_cols(r)) loops += static_cast<std::size_t>(c) == r ? 1 : 0;
  }
  return (a.nnz() - loops) / 2;
}

}  // namespace cgcn
