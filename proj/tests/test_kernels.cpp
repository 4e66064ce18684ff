#include <cstring>

#include "doctest.h"
#include "oracles.hpp"

#include "cgcn/kernels.hpp"
#include "cgcn/sparse.hpp"

using namespace cgcn;

namespace {

bool bit_equal(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    if (std::memcmp(&a.values()[i], &b.values()[i], sizeof(double)) != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("OpenMP kernels are bit-identical to serial at any thread count") {
  const auto a = row_normalize_aug(from_edges(oracle::random_edges(300, 0.03, 1), 300));
  const DenseMatrix x = oracle::random_dense(300, 17, 2);
  const DenseMatrix w = oracle::random_dense(17, 9, 3);
  const DenseMatrix y = oracle::random_dense(300, 9, 4);
  for (int t : {1, 2, 3, 4, 8}) {
    CAPTURE(t);
    CHECK(bit_equal(kernels::omp::spmm(a, x, t), kernels::serial::spmm(a, x)));
    CHECK(bit_equal(kernels::omp::gemm(x, w, t), kernels::serial::gemm(x, w)));
    CHECK(bit_equal(kernels::omp::gemm_tn(x, y, t), kernels::serial::gemm_tn(x, y)));
    CHECK(bit_equal(kernels::omp::gemm_nt(y, w, t), kernels::serial::gemm_nt(y, w)));
  }
}

TEST_CASE("dense kernels agree with the naive oracle") {
  const DenseMatrix a = oracle::random_dense(13, 7, 5);
  const DenseMatrix b = oracle::random_dense(7, 11, 6);
  const DenseMatrix c = oracle::random_dense(13, 11, 7);
  const auto ga = oracle::grid(a), gb = oracle::grid(b), gc = oracle::grid(c);
  CHECK(oracle::max_abs_diff(oracle::grid(kernels::gemm(a, b)), oracle::matmul(ga, gb)) <= 1e-13);
  CHECK(oracle::max_abs_diff(oracle::grid(kernels::gemm_tn(a, c)), oracle::matmul(oracle::transpose(ga), gc)) <= 1e-13);
  CHECK(oracle::max_abs_diff(oracle::grid(kernels::gemm_nt(c, b)), oracle::matmul(gc, oracle::transpose(gb))) <= 1e-13);
}

TEST_CASE("thread cap setter round-trips") {
  const int before = kernels::num_threads();
  kernels::set_num_threads(3);
  CHECK(kernels::num_threads() == 3);
  kernels::set_num_threads(before);
}
