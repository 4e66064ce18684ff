#include "cgcn/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

#include "cgcn/error.hpp"

namespace cgcn::kernels {
namespace {

int threads_from_env() {
  const char* env = std::getenv("CLUSTER_GCN_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 1;
  }
}

std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{threads_from_env()};
  return cap;
}

void check_spmm(const SparseMatrix& a, const DenseMatrix& x) {
  if (a.n_cols != x.rows()) {
    throw InputError("spmm: sparse matrix has " + std::to_string(a.n_cols) +
                     " columns but dense operand has " + std::to_string(x.rows()) + " rows");
  }
}

void check_gemm(std::size_t inner_a, std::size_t inner_b, const char* what) {
  if (inner_a != inner_b) {
    throw InputError(std::string(what) + ": inner dimensions differ (" + std::to_string(inner_a) +
                     " vs " + std::to_string(inner_b) + ")");
  }
}

// Row kernels shared by both execution forms.
inline void spmm_row(const SparseMatrix& a, const DenseMatrix& x, DenseMatrix& y, std::size_t r) {
  const std::size_t f = x.cols();
  double* out = y.row(r).data();
  for (auto k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
    const double v = a.values[k];
    const double* in = x.row(static_cast<std::size_t>(a.col_indices[k])).data();
    for (std::size_t j = 0; j < f; ++j) out[j] += v * in[j];
  }
}

inline void gemm_row(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c, std::size_t i) {
  const std::size_t inner = a.cols();
  const std::size_t n = b.cols();
  double* out = c.row(i).data();
  for (std::size_t k = 0; k < inner; ++k) {
    const double s = a(i, k);
    if (s == 0.0) continue;
    const double* in = b.row(k).data();
    for (std::size_t j = 0; j < n; ++j) out[j] += s * in[j];
  }
}

inline void gemm_tn_row(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c, std::size_t i) {
  const std::size_t n = b.cols();
  double* out = c.row(i).data();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double s = a(k, i);
    if (s == 0.0) continue;
    const double* in = b.row(k).data();
    for (std::size_t j = 0; j < n; ++j) out[j] += s * in[j];
  }
}

inline void gemm_nt_row(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c, std::size_t i) {
  const std::size_t inner = a.cols();
  const double* lhs = a.row(i).data();
  for (std::size_t j = 0; j < b.rows(); ++j) {
    const double* rhs = b.row(j).data();
    double acc = 0.0;
    for (std::size_t k = 0; k < inner; ++k) acc += lhs[k] * rhs[k];
    c(i, j) = acc;
  }
}

}  // namespace

int num_threads() { return thread_cap().load(); }

void set_num_threads(int n) { thread_cap().store(std::max(1, n)); }

namespace serial {

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) {
  check_spmm(a, x);
  DenseMatrix y(a.n_rows, x.cols());
  for (std::size_t r = 0; r < a.n_rows; ++r) spmm_row(a, x, y, r);
  return y;
}

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
  check_gemm(a.cols(), b.rows(), "gemm");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) gemm_row(a, b, c, i);
  return c;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  check_gemm(a.rows(), b.rows(), "gemm_tn");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) gemm_tn_row(a, b, c, i);
  return c;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
  check_gemm(a.cols(), b.cols(), "gemm_nt");
  DenseMatrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) gemm_nt_row(a, b, c, i);
  return c;
}

}  // namespace serial

namespace omp {

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x, int threads) {
  check_spmm(a, x);
  DenseMatrix y(a.n_rows, x.cols());
  const auto rows = static_cast<std::int64_t>(a.n_rows);
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (std::int64_t r = 0; r < rows; ++r) spmm_row(a, x, y, static_cast<std::size_t>(r));
  return y;
}

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b, int threads) {
  check_gemm(a.cols(), b.rows(), "gemm");
  DenseMatrix c(a.rows(), b.cols());
  const auto rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < rows; ++i) gemm_row(a, b, c, static_cast<std::size_t>(i));
  return c;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b, int threads) {
  check_gemm(a.rows(), b.rows(), "gemm_tn");
  DenseMatrix c(a.cols(), b.cols());
  const auto rows = static_cast<std::int64_t>(a.cols());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < rows; ++i) gemm_tn_row(a, b, c, static_cast<std::size_t>(i));
  return c;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b, int threads) {
  check_gemm(a.cols(), b.cols(), "gemm_nt");
  DenseMatrix c(a.rows(), b.rows());
  const auto rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < rows; ++i) gemm_nt_row(a, b, c, static_cast<std::size_t>(i));
  return c;
}

}  // namespace omp

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) {
  const int t = num_threads();
  return t > 1 ? omp::spmm(a, x, t) : serial::spmm(a, x);
}

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
  const int t = num_threads();
  return t > 1 ? omp::gemm(a, b, t) : serial::gemm(a, b);
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  const int t = num_threads();
  return t > 1 ? omp::gemm_tn(a, b, t) : serial::gemm_tn(a, b);
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
  const int t = num_threads();
  return t > 1 ? omp::gemm_nt(a, b, t) : serial::gemm_nt(a, b);
}

}  // namespace cgcn::kernels
