// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/metrics/evaluate.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "pvse/common/error.h"
#include "pvse/common/parallel.h"
#include "pvse/enhancer/enhancer.h"
#include "pvse/lipgen/student.h"
#include "pvse/metrics/metrics.h"

namespace pvse::metrics {

std::string ArmName(Arm arm) {
  switch (arm) {
    case Arm::kNoisy: return "noisy";
    case Arm::kAo: return "ao";
    case Arm::kOurs: return "ours";
  }
  return "unknown";
}

Arm ParseArm(const std::string &name) {
  for (Arm a : {Arm::kNoisy, Arm::kAo, Arm::kOurs}) {
    if (ArmName(a) == name) return a;
  }
  PVSE_THROW(kInvalidArgument, "unknown arm '", name, "' (expected noisy, ao or ours)");
}

const std::vector<std::string> &MetricNames() {
  static const std::vector<std::string> names = {"stoi", "si_sdr", "seg_snr",
                                                 "llr",  "wss",    "spec_l1"};
  return names;
}

namespace {

std::string SnrKey(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", snr);
  return buf;
}

std::vector<double> AllMetrics(const signal::Waveform &clean, const signal::Waveform &out) {
  return {Stoi(clean, out), SiSdr(clean, out), SegSnr(clean, out),
          Llr(clean, out),  Wss(clean, out),   SpectralL1(clean, out)};
}

}  // namespace

nlohmann::ordered_json EvaluateDataset(const std::vector<data::MixManifestEntry> &manifest,
                                       const std::string &manifest_path,
                                       const EvalOptions &options,
                                       const std::string &out_path) {
  std::vector<data::MixManifestEntry> entries =
      options.split ? data::FilterSplit(manifest, *options.split) : manifest;
  PVSE_CHECK(!entries.empty(), kEmptyManifest, "no manifest entries to evaluate");
  PVSE_CHECK(!options.arms.empty(), kInvalidArgument, "no arms requested");

  std::optional<lipgen::StudentModel> student;
  std::optional<enhancer::EnhancerModel> ao, ours;
  for (Arm arm : options.arms) {
    if (arm == Arm::kAo && !ao) {
      PVSE_CHECK(!options.ao_dir.empty(), kNoCheckpoint, "arm 'ao' needs an enhancer checkpoint");
      ao = enhancer::LoadEnhancer(options.ao_dir);
    }
    if (arm == Arm::kOurs && !ours) {
      PVSE_CHECK(!options.ours_dir.empty(), kNoCheckpoint,
                 "arm 'ours' needs an enhancer checkpoint");
      ours = enhancer::LoadEnhancer(options.ours_dir);
    }
  }
  const bool need_student = (ao && ao->net.config().use_visual) ||
                            (ours && ours->net.config().use_visual);
  if (need_student) {
    PVSE_CHECK(!options.student_dir.empty(), kNoCheckpoint,
               "visual enhancer arms need a student checkpoint");
    student = lipgen::LoadStudent(options.student_dir);
  }
  const lipgen::StudentModel *student_ptr = student ? &*student : nullptr;

  // results[entry][arm] = metric values
  std::vector<std::vector<std::vector<double>>> results(entries.size());
  ParallelFor(entries.size(), [&](size_t e) {
    const data::MixResult mix = data::RealizeEntry(entries[e]);
    for (Arm arm : options.arms) {
      signal::Waveform out;
      switch (arm) {
        case Arm::kNoisy: out = mix.mixture; break;
        case Arm::kAo: out = enhancer::EnhanceUtterance(mix.mixture, student_ptr, *ao); break;
        case Arm::kOurs:
          out = enhancer::EnhanceUtterance(mix.mixture, student_ptr, *ours);
          break;
      }
      results[e].push_back(AllMetrics(mix.clean, out));
    }
  });

  const auto &names = MetricNames();
  nlohmann::ordered_json report;
  report["version"] = kReportVersion;
  report["manifest_path"] = manifest_path;
  report["arms"] = nlohmann::ordered_json::array();
  for (Arm arm : options.arms) report["arms"].push_back(ArmName(arm));

  report["per_utterance"] = nlohmann::ordered_json::array();
  std::map<double, std::vector<size_t>> by_snr;
  for (size_t e = 0; e < entries.size(); ++e) {
    by_snr[entries[e].snr_db].push_back(e);
    nlohmann::ordered_json row;
    char id[32];
    std::snprintf(id, sizeof(id), "%04zu:", e);
    row["id"] = id + std::filesystem::path(entries[e].clean_path).stem().string();
    row["snr_db"] = entries[e].snr_db;
    row["split"] = data::SplitName(entries[e].split);
    for (size_t a = 0; a < options.arms.size(); ++a) {
      nlohmann::ordered_json values;
      for (size_t m = 0; m < names.size(); ++m) values[names[m]] = results[e][a][m];
      row[ArmName(options.arms[a])] = values;
    }
    report["per_utterance"].push_back(row);
  }

  nlohmann::ordered_json aggregates = nlohmann::ordered_json::object();
  for (const auto &[snr, idx] : by_snr) {
    nlohmann::ordered_json per_arm;
    for (size_t a = 0; a < options.arms.size(); ++a) {
      nlohmann::ordered_json per_metric;
      for (size_t m = 0; m < names.size(); ++m) {
        double mean = 0.0;
        for (size_t e : idx) mean += results[e][a][m];
        mean /= static_cast<double>(idx.size());
        double var = 0.0;
        for (size_t e : idx) var += (results[e][a][m] - mean) * (results[e][a][m] - mean);
        var /= static_cast<double>(idx.size());
        per_metric[names[m]] = {{"mean", mean}, {"std", std::sqrt(var)}, {"count", idx.size()}};
      }
      per_arm[ArmName(options.arms[a])] = per_metric;
    }
    aggregates[SnrKey(snr)] = per_arm;
  }
  report["aggregates"] = aggregates;

  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::trunc);
    PVSE_CHECK(os.good(), kIoFailure, "cannot open ", out_path, " for writing");
    os << report.dump(2) << "\n";
    PVSE_CHECK(os.good(), kIoFailure, "write failed for ", out_path);
  }
  return report;
}

}  // namespace pvse::metrics
