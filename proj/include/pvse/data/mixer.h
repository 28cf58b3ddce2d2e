// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_DATA_MIXER_H_
#define PVSE_DATA_MIXER_H_

#include <cstdint>

#include "pvse/signal/waveform.h"

namespace pvse::data {

using signal::Waveform;

// Mean of squared samples. Throws EmptySignal on empty input.
double MeasurePower(const Waveform &wave);

struct MixResult {
  Waveform mixture;
  // Both components carry the same peak-protection scale as the mixture, so
  // mixture == clean + noise sample by sample.
  Waveform clean;
  Waveform noise;
  double gain = 1.0;        // applied to the aligned noise before peak scaling
  double peak_scale = 1.0;  // common factor, < 1 only when the mix would clip
  size_t noise_offset = 0;  // start of the aligned noise segment
};

inline constexpr double kPeakLimit = 0.95;

// Mixes noise into clean at the requested SNR, measured over the whole
// aligned segment. Noise longer than clean is cut at a seeded offset; shorter
// noise is looped from a seeded offset. Throws SilentInput when either input
// has zero power.
MixResult MixAtSnr(const Waveform &clean, const Waveform &noise, double snr_db,
                   uint64_t seed);

// 10 log10(P(mixture - noise) / P(noise)).
double MeasureSnrDb(const Waveform &mixture, const Waveform &noise);

}  // namespace pvse::data

#endif  // PVSE_DATA_MIXER_H_
