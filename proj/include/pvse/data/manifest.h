// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_DATA_MANIFEST_H_
#define PVSE_DATA_MANIFEST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pvse/data/mixer.h"

namespace pvse::data {

enum class Split { kTrain, kVal, kTest };

std::string SplitName(Split split);
Split ParseSplit(const std::string &name);

struct MixManifestEntry {
  std::string clean_path;
  std::string noise_path;
  double snr_db = 0.0;
  Split split = Split::kTrain;
  uint64_t seed = 0;

  void Validate() const;
};

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Pairs every clean file with each SNR in snr_list and a seeded random noise
// file. Splits are assigned per clean file, so no clean file lands in two
// splits. Writes JSONL to manifest_path and returns the entries.
std::vector<MixManifestEntry> SynthesizeDataset(
    const std::string &clean_dir, const std::string &noise_dir,
    const std::vector<double> &snr_list, const SplitFractions &fractions,
    uint64_t seed, const std::string &manifest_path);

void WriteManifest(const std::string &path,
                   const std::vector<MixManifestEntry> &entries);
std::vector<MixManifestEntry> ReadManifest(const std::string &path);

std::vector<MixManifestEntry> FilterSplit(const std::vector<MixManifestEntry> &entries,
                                          Split split);

// Sorted *.wav paths in a directory. Throws EmptyDirectory if none.
std::vector<std::string> ListWavFiles(const std::string &dir);

// Loads both files and mixes them with the entry's SNR and seed.
MixResult RealizeEntry(const MixManifestEntry &entry);

}  // namespace pvse::data

#endif  // PVSE_DATA_MANIFEST_H_
