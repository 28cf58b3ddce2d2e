// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/nn/adam.h"

#include <cmath>

#include "pvse/common/error.h"

namespace pvse::nn {

template <typename T>
void AdamStep(std::vector<Tensor<T>> &params, AdamState<T> *state) {
  if (state->first_moment.empty()) {
    for (const auto &p : params) {
      state->first_moment.emplace_back(p.size(), T(0));
      state->second_moment.emplace_back(p.size(), T(0));
    }
  }
  PVSE_CHECK(state->first_moment.size() == params.size(), kShapeMismatch,
             "optimizer state has ", state->first_moment.size(),
             " slots for ", params.size(), " parameters");
  ++state->step;
  const AdamConfig &c = state->config;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state->step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state->step));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor<T> &p = params[i];
    auto &m = state->first_moment[i];
    auto &v = state->second_moment[i];
    PVSE_CHECK(m.size() == p.size(), kShapeMismatch, "moment size mismatch for parameter ", i);
    if (!p.has_grad()) continue;
    auto value = p.data();
    auto grad = p.grad();
    for (size_t j = 0; j < p.size(); ++j) {
      const double g = grad[j];
      const double mj = c.beta1 * m[j] + (1.0 - c.beta1) * g;
      const double vj = c.beta2 * v[j] + (1.0 - c.beta2) * g * g;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double m_hat = mj / correction1;
      const double v_hat = vj / correction2;
      value[j] = static_cast<T>(value[j] - c.lr * m_hat / (std::sqrt(v_hat) + c.eps));
    }
  }
}

template <typename T>
void ZeroGrads(std::vector<Tensor<T>> &params) {
  for (auto &p : params) p.ZeroGrad();
}

template void AdamStep<float>(std::vector<Tensor<float>> &, AdamState<float> *);
template void AdamStep<double>(std::vector<Tensor<double>> &, AdamState<double> *);
template void ZeroGrads<float>(std::vector<Tensor<float>> &);
template void ZeroGrads<double>(std::vector<Tensor<double>> &);

}  // namespace pvse::nn
