// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_NN_GRADCHECK_H_
#define PVSE_NN_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "pvse/nn/tensor.h"

namespace pvse::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  size_t coordinates = 0;
  size_t worst_tensor = 0;
  size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares the recorded-graph gradient of a scalar loss against central
// differences for every coordinate of `wrt`. Relative error uses the
// denominator max(|analytic|, |numeric|, 1e-6). `loss` must rebuild the graph
// from the current values of `wrt` on each call.
GradCheckResult FiniteDiffCheck(const std::function<Tensor<double>()> &loss,
                                std::vector<Tensor<double>> wrt, double h = 1e-5);

}  // namespace pvse::nn

#endif  // PVSE_NN_GRADCHECK_H_
