// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/data/manifest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "pvse/common/error.h"
#include "pvse/common/random.h"

namespace pvse::data {

namespace fs = std::filesystem;

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split ParseSplit(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  PVSE_THROW(kInvalidArgument, "unknown split '", name, "'");
}

void MixManifestEntry::Validate() const {
  PVSE_CHECK(!clean_path.empty() && !noise_path.empty(), kInvalidArgument,
             "manifest entry has an empty path");
  PVSE_CHECK(std::isfinite(snr_db), kInvalidArgument, "manifest snr_db not finite");
}

std::vector<std::string> ListWavFiles(const std::string &dir) {
  std::error_code ec;
  PVSE_CHECK(fs::is_directory(dir, ec), kEmptyDirectory, dir, " is not a directory");
  std::vector<std::string> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(entry.path().string());
    }
  }
  PVSE_CHECK(!files.empty(), kEmptyDirectory, "no .wav files in ", dir);
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<MixManifestEntry> SynthesizeDataset(
    const std::string &clean_dir, const std::string &noise_dir,
    const std::vector<double> &snr_list, const SplitFractions &fractions,
    uint64_t seed, const std::string &manifest_path) {
  PVSE_CHECK(!snr_list.empty(), kInvalidArgument, "snr_list is empty");
  PVSE_CHECK(fractions.train >= 0 && fractions.val >= 0 && fractions.test >= 0 &&
                 fractions.train + fractions.val + fractions.test > 0,
             kInvalidArgument, "split fractions must be non-negative");
  const auto clean = ListWavFiles(clean_dir);
  const auto noise = ListWavFiles(noise_dir);

  std::vector<size_t> order(clean.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng shuffle_rng(MixSeed(seed, 0));
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[shuffle_rng.Index(i)]);
  }
  const double total = fractions.train + fractions.val + fractions.test;
  const auto n = static_cast<double>(clean.size());
  const auto n_train = static_cast<size_t>(std::llround(n * fractions.train / total));
  const auto n_val = std::min(clean.size() - n_train,
                              static_cast<size_t>(std::llround(n * fractions.val / total)));
  std::vector<Split> split_of(clean.size());
  for (size_t rank = 0; rank < order.size(); ++rank) {
    split_of[order[rank]] = rank < n_train           ? Split::kTrain
                            : rank < n_train + n_val ? Split::kVal
                                                     : Split::kTest;
  }

  Rng pair_rng(MixSeed(seed, 1));
  std::vector<MixManifestEntry> entries;
  entries.reserve(clean.size() * snr_list.size());
  for (size_t i = 0; i < clean.size(); ++i) {
    for (double snr : snr_list) {
      MixManifestEntry e;
      e.clean_path = clean[i];
      e.noise_path = noise[pair_rng.Index(noise.size())];
      e.snr_db = snr;
      e.split = split_of[i];
      e.seed = pair_rng.NextU64() >> 11;  // stays exact in a JSON double
      entries.push_back(std::move(e));
    }
  }
  WriteManifest(manifest_path, entries);
  return entries;
}

void WriteManifest(const std::string &path,
                   const std::vector<MixManifestEntry> &entries) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  PVSE_CHECK(os.good(), kIoFailure, "cannot open ", path, " for writing");
  for (const auto &e : entries) {
    e.Validate();
    nlohmann::ordered_json j;
    j["clean_path"] = e.clean_path;
    j["noise_path"] = e.noise_path;
    j["snr_db"] = e.snr_db;
    j["split"] = SplitName(e.split);
    j["seed"] = e.seed;
    os << j.dump() << '\n';
  }
  PVSE_CHECK(os.good(), kIoFailure, "write failed for ", path);
}

std::vector<MixManifestEntry> ReadManifest(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  PVSE_CHECK(is.good(), kIoFailure, "cannot open manifest ", path);
  std::vector<MixManifestEntry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      MixManifestEntry e;
      e.clean_path = j.at("clean_path").get<std::string>();
      e.noise_path = j.at("noise_path").get<std::string>();
      e.snr_db = j.at("snr_db").get<double>();
      e.split = ParseSplit(j.at("split").get<std::string>());
      e.seed = j.at("seed").get<uint64_t>();
      e.Validate();
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception &ex) {
      PVSE_THROW(kMalformedFile, path, ":", line_no, ": ", ex.what());
    }
  }
  return entries;
}

std::vector<MixManifestEntry> FilterSplit(const std::vector<MixManifestEntry> &entries,
                                          Split split) {
  std::vector<MixManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [split](const MixManifestEntry &e) { return e.split == split; });
  return out;
}

MixResult RealizeEntry(const MixManifestEntry &entry) {
  const auto clean = signal::ReadWav(entry.clean_path);
  const auto noise = signal::ReadWav(entry.noise_path);
  return MixAtSnr(clean, noise, entry.snr_db, entry.seed);
}

}  // namespace pvse::data
