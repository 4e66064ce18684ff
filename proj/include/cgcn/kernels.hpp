#pragma once

// Dense and sparse products used by the GCN layers. Every kernel exists in a
// serial reference form and an OpenMP form. The OpenMP forms partition work by
// output row and keep each row's reduction order identical to the serial code,
// so results are bit-identical at any thread count.

#include "cgcn/matrix.hpp"

namespace cgcn::kernels {

// Worker-thread cap. Initialised from CLUSTER_GCN_THREADS (default 1).
int num_threads();
void set_num_threads(int n);

namespace serial {
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);     // a * b
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);  // a^T * b
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);  // a * b^T
}  // namespace serial

namespace omp {
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x, int threads);
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b, int threads);
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b, int threads);
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b, int threads);
}  // namespace omp

// Dispatch on num_threads(): serial when 1, OpenMP otherwise.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace cgcn::kernels
