#include "cgcn/optimizer.hpp"

#include <cmath>
#include <string>

#include "cgcn/error.hpp"

namespace cgcn {

AdamState AdamState::for_weights(const std::vector<DenseMatrix>& weights, double lr) {
  AdamState s;
  s.lr = lr;
  for (const auto& w : weights) {
    s.m.emplace_back(w.rows(), w.cols());
    s.v.emplace_back(w.rows(), w.cols());
  }
  return s;
}

void adam_step(AdamState& state, std::vector<DenseMatrix>& weights,
               const std::vector<DenseMatrix>& grads) {
  if (weights.size() != grads.size() || weights.size() != state.m.size()) {
    throw InputError("adam_step: weights, gradients and state disagree in count");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rows() != grads[i].rows() || weights[i].cols() != grads[i].cols() ||
        state.m[i].rows() != grads[i].rows() || state.m[i].cols() != grads[i].cols()) {
      throw InputError("adam_step: shape mismatch for parameter " + std::to_string(i));
    }
    if (!grads[i].all_finite()) {
      throw NumericError("adam_step: non-finite gradient for parameter " + std::to_string(i));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto& w = weights[i].values();
    auto& m = state.m[i].values();
    auto& v = state.v[i].values();
    const auto& g = grads[i].values();
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      w[j] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace cgcn
