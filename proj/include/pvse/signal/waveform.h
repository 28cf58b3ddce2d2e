// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_SIGNAL_WAVEFORM_H_
#define PVSE_SIGNAL_WAVEFORM_H_

#include <cstddef>
#include <string>
#include <vector>

namespace pvse::signal {

inline constexpr int kDefaultSampleRate = 16000;

// Mono audio, nominal amplitude range [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kDefaultSampleRate;

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double Seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws InvalidArgument on non-finite samples or a non-positive rate.
void ValidateWaveform(const Waveform &wave);

enum class WavEncoding { kPcm16, kFloat32 };

// Reads RIFF/WAVE (PCM16 or IEEE float32, mono or stereo). Stereo input is
// averaged to mono.
Waveform ReadWav(const std::string &path);

// Writes a mono file. PCM16 output clips samples to [-1, 1].
void WriteWav(const std::string &path, const Waveform &wave,
              WavEncoding encoding = WavEncoding::kFloat32);

// Band-limited resampling with a 64-tap Kaiser-windowed sinc kernel.
// Output length is round(len * target / source); equal rates return a copy.
Waveform Resample(const Waveform &wave, int target_rate);

}  // namespace pvse::signal

#endif  // PVSE_SIGNAL_WAVEFORM_H_
