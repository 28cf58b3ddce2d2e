// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/nn/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace pvse::nn {

namespace {
// Keeps round-off on vanishing gradients from dominating the ratio.
constexpr double kRelativeFloor = 1e-6;
}  // namespace

GradCheckResult FiniteDiffCheck(const std::function<Tensor<double>()> &loss,
                                std::vector<Tensor<double>> wrt, double h) {
  for (auto &t : wrt) {
    t.set_requires_grad(true);
    t.ZeroGrad();
  }
  loss().Backward();
  std::vector<std::vector<double>> analytic;
  for (auto &t : wrt) analytic.emplace_back(t.grad().begin(), t.grad().end());

  GradCheckResult result;
  NoGradGuard no_grad;
  for (size_t ti = 0; ti < wrt.size(); ++ti) {
    auto values = wrt[ti].data();
    for (size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double plus = loss().item();
      values[i] = saved - h;
      const double minus = loss().item();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      const double a = analytic[ti][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), kRelativeFloor});
      const double rel = std::abs(a - numeric) / denom;
      ++result.coordinates;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_tensor = ti;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace pvse::nn
