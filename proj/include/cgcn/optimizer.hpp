#pragma once

#include <cstdint>
#include <vector>

#include "cgcn/matrix.hpp"

namespace cgcn {

// Adam with bias correction and no weight decay.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<DenseMatrix> m;
  std::vector<DenseMatrix> v;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_weights(const std::vector<DenseMatrix>& weights, double lr = 0.01);

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// Updates weights and state in place. A non-finite gradient throws
// NumericError before anything is modified.
void adam_step(AdamState& state, std::vector<DenseMatrix>& weights,
               const std::vector<DenseMatrix>& grads);

}  // namespace cgcn
