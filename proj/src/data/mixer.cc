// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/data/mixer.h"

#include <algorithm>
#include <cmath>

#include "pvse/common/error.h"
#include "pvse/common/random.h"

namespace pvse::data {

double MeasurePower(const Waveform &wave) {
  PVSE_CHECK(!wave.empty(), kEmptySignal, "cannot measure power of empty signal");
  double acc = 0.0;
  for (float s : wave.samples) acc += static_cast<double>(s) * s;
  return acc / static_cast<double>(wave.size());
}

MixResult MixAtSnr(const Waveform &clean, const Waveform &noise, double snr_db,
                   uint64_t seed) {
  PVSE_CHECK(std::isfinite(snr_db), kInvalidArgument, "snr must be finite");
  PVSE_CHECK(clean.sample_rate == noise.sample_rate, kInvalidArgument,
             "sample rates differ: ", clean.sample_rate, " vs ", noise.sample_rate);
  PVSE_CHECK(!clean.empty() && !noise.empty(), kEmptySignal, "empty input to mixer");

  const size_t n = clean.size();
  Rng rng(seed);
  MixResult mix;
  if (noise.size() > n) {
    mix.noise_offset = rng.Index(noise.size() - n + 1);
  } else if (noise.size() < n) {
    mix.noise_offset = rng.Index(noise.size());
  }
  Waveform aligned;
  aligned.sample_rate = noise.sample_rate;
  aligned.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    aligned.samples[i] = noise.samples[(mix.noise_offset + i) % noise.size()];
  }

  const double p_clean = MeasurePower(clean);
  const double p_noise = MeasurePower(aligned);
  PVSE_CHECK(p_clean > 0.0, kSilentInput, "clean signal has zero power");
  PVSE_CHECK(p_noise > 0.0, kSilentInput, "noise segment has zero power");
  mix.gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));

  std::vector<double> mixed(n);
  double peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mixed[i] = clean.samples[i] + mix.gain * aligned.samples[i];
    peak = std::max(peak, std::abs(mixed[i]));
  }
  mix.peak_scale = peak > kPeakLimit ? kPeakLimit / peak : 1.0;

  mix.mixture.sample_rate = mix.clean.sample_rate = mix.noise.sample_rate =
      clean.sample_rate;
  mix.mixture.samples.resize(n);
  mix.clean.samples.resize(n);
  mix.noise.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    mix.clean.samples[i] = static_cast<float>(mix.peak_scale * clean.samples[i]);
    mix.noise.samples[i] =
        static_cast<float>(mix.peak_scale * mix.gain * aligned.samples[i]);
    mix.mixture.samples[i] = static_cast<float>(mix.peak_scale * mixed[i]);
  }
  return mix;
}

double MeasureSnrDb(const Waveform &mixture, const Waveform &noise) {
  PVSE_CHECK(mixture.size() == noise.size(), kLengthMismatch,
             "mixture and noise lengths differ");
  double p_signal = 0.0, p_noise = 0.0;
  for (size_t i = 0; i < mixture.size(); ++i) {
    const double s = static_cast<double>(mixture.samples[i]) - noise.samples[i];
    p_signal += s * s;
    p_noise += static_cast<double>(noise.samples[i]) * noise.samples[i];
  }
  PVSE_CHECK(p_noise > 0.0, kSilentInput, "noise has zero power");
  return 10.0 * std::log10(p_signal / p_noise);
}

}  // namespace pvse::data
