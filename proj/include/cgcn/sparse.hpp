#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cgcn/matrix.hpp"

namespace cgcn {

using Edge = std::pair<Index, Index>;

enum class NormMode { kRow, kSym };

NormMode parse_norm_mode(std::string_view s);
std::string_view to_string(NormMode m);

// Symmetric binary adjacency over n nodes. Duplicates and both directions of
// an edge collapse to one undirected edge; self-loops are dropped.
SparseMatrix from_edges(std::span<const Edge> edges, std::size_t n);

// (D + I)^-1 (A + I), D the degree diagonal of `a`. Rows sum to one.
SparseMatrix row_normalize_aug(const SparseMatrix& a);

// D~^-1/2 (A + I) D~^-1/2 with D~ the degree diagonal of A + I.
SparseMatrix sym_normalize_aug(const SparseMatrix& a);

SparseMatrix normalize(const SparseMatrix& a, NormMode mode);

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);

// Principal submatrix a[nodes, nodes] in the given node order.
SparseMatrix extract_submatrix(const SparseMatrix& a, std::span<const Index> nodes);

SparseMatrix transpose(const SparseMatrix& a);

// a + scale * diag(a), where diag(a) keeps only a's diagonal entries.
SparseMatrix add_scaled_diagonal(const SparseMatrix& a, double scale);

DenseMatrix to_dense(const SparseMatrix& a);

// Number of undirected edges of a symmetric loop-free adjacency.
std::size_t undirected_edge_count(const SparseMatrix& a);

}  // namespace cgcn
