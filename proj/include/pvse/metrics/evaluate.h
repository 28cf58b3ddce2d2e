// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_METRICS_EVALUATE_H_
#define PVSE_METRICS_EVALUATE_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvse/data/manifest.h"

namespace pvse::metrics {

enum class Arm { kNoisy, kAo, kOurs };
std::string ArmName(Arm arm);
Arm ParseArm(const std::string &name);

inline constexpr int kReportVersion = 1;

struct EvalOptions {
  std::vector<Arm> arms = {Arm::kNoisy};
  std::string student_dir;   // needed by "ours"
  std::string ao_dir;        // enhancer checkpoint for "ao"
  std::string ours_dir;      // enhancer checkpoint for "ours"
  std::optional<data::Split> split;  // unset evaluates every entry
};

// Metric names in report order.
const std::vector<std::string> &MetricNames();

// Evaluates each manifest entry under every arm against the clean component
// of its mixture. Writes the report to `out_path` when non-empty. Throws
// EmptyManifest, NoCheckpoint.
nlohmann::ordered_json EvaluateDataset(const std::vector<data::MixManifestEntry> &manifest,
                                       const std::string &manifest_path,
                                       const EvalOptions &options,
                                       const std::string &out_path);

}  // namespace pvse::metrics

#endif  // PVSE_METRICS_EVALUATE_H_
