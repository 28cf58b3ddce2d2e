// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_NN_ADAM_H_
#define PVSE_NN_ADAM_H_

#include <cstdint>
#include <vector>

#include "pvse/nn/tensor.h"

namespace pvse::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  int64_t step = 0;
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
};

// One bias-corrected Adam update of params using their accumulated grads.
// Moments are allocated on the first call; the step counter is incremented
// before bias correction. Params without a grad slot are treated as having a
// zero gradient.
template <typename T>
void AdamStep(std::vector<Tensor<T>> &params, AdamState<T> *state);

template <typename T>
void ZeroGrads(std::vector<Tensor<T>> &params);

}  // namespace pvse::nn

#endif  // PVSE_NN_ADAM_H_
