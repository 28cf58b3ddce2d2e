// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_ENHANCER_GRAD_SUITE_H_
#define PVSE_ENHANCER_GRAD_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pvse/nn/gradcheck.h"

namespace pvse::enhancer {

inline constexpr double kGradTolerance = 1e-4;

struct GradSuiteEntry {
  std::string name;
  nn::GradCheckResult result;
  bool passed() const { return result.max_rel_error < kGradTolerance; }
};

// Central finite-difference checks at 64-bit for every layer kind, the loss
// and reshaping ops, a tiny student and a tiny enhancer (visual and
// audio-only).
std::vector<GradSuiteEntry> RunGradientSuite(uint64_t seed = 0);

}  // namespace pvse::enhancer

#endif  // PVSE_ENHANCER_GRAD_SUITE_H_
