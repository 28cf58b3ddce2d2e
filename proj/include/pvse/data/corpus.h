// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_DATA_CORPUS_H_
#define PVSE_DATA_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pvse/signal/waveform.h"

namespace pvse::data {

enum class NoiseKind { kWhite, kPink, kChirp, kAmTone, kBabbleProxy };

std::string NoiseKindName(NoiseKind kind);
// Accepts "white", "pink", "chirp", "am-tone", "babble-proxy".
NoiseKind ParseNoiseKind(const std::string &name);
std::vector<NoiseKind> AllNoiseKinds();

struct CorpusConfig {
  int n_utterances = 10;
  double utt_seconds = 3.0;
  int sample_rate = signal::kDefaultSampleRate;
  uint64_t seed = 0;
  std::vector<NoiseKind> noise_kinds = AllNoiseKinds();
  int noise_files_per_kind = 2;

  void Validate() const;
};

// Harmonic source (F0 in [90, 220] Hz) shaped by two time-varying formant
// resonators, cut into syllables separated by exact-zero silence gaps.
signal::Waveform SynthesizeSpeech(double seconds, int sample_rate, uint64_t seed);

signal::Waveform SynthesizeNoise(NoiseKind kind, double seconds, int sample_rate,
                                 uint64_t seed);

struct CorpusSummary {
  int clean_files = 0;
  int noise_files = 0;
  double seconds = 0.0;  // total clean audio
};

// Writes <root>/clean/utt_NNNN.wav and <root>/noise/<kind>_NN.wav as float32
// WAV. Output bytes depend only on the config.
CorpusSummary GenerateSyntheticCorpus(const CorpusConfig &config,
                                      const std::string &root);

}  // namespace pvse::data

#endif  // PVSE_DATA_CORPUS_H_
