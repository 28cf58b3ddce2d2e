// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_SIGNAL_MEL_H_
#define PVSE_SIGNAL_MEL_H_

#include <vector>

#include "pvse/signal/waveform.h"

namespace pvse::signal {

struct MelParams {
  int sample_rate = kDefaultSampleRate;
  int n_mels = 80;
  double hop_ms = 12.5;
  double win_ms = 50.0;
  int fft_size = 800;
  double fmin = 55.0;
  double fmax = 7600.0;
  double floor = 1e-5;

  int HopSamples() const;
  int WinSamples() const;
};

// Frame-major N x n_mels natural-log filterbank energies.
struct MelSpectrogram {
  int num_frames = 0;
  int n_mels = 0;
  std::vector<float> values;

  float at(int t, int m) const {
    return values[static_cast<size_t>(t) * n_mels + m];
  }
};

// 0.2 s of mel context (16 frames x 80 bands), frame-major.
struct MelChunk {
  static constexpr int kFrames = 16;
  static constexpr int kBands = 80;
  std::vector<float> values = std::vector<float>(kFrames * kBands);

  float at(int t, int m) const { return values[static_cast<size_t>(t) * kBands + m]; }
};

// Triangular HTK-mel filters with unit peak, n_mels x (fft_size / 2 + 1).
std::vector<std::vector<double>> MelFilterbank(const MelParams &params);

// log(max(E, floor)) of mel filterbank energies, where E weights the power
// spectrum normalized by the squared window sum (a sine of amplitude A
// contributes about A^2 / 4 at its peak bin). N = floor(len / hop).
MelSpectrogram ComputeMel(const Waveform &wave, const MelParams &params = {});

inline constexpr double kLipFps = 25.0;

// Mel frame at the center of lip frame `lip_index`.
int LipFrameCenter(int lip_index, const MelParams &params = {},
                   double fps = kLipFps);

// 16-frame chunk centered on the timestamp of lip frame `lip_index`; rows
// beyond either edge repeat the nearest edge frame.
MelChunk ChunkMel(const MelSpectrogram &mel, int lip_index,
                  const MelParams &params = {}, double fps = kLipFps);

}  // namespace pvse::signal

#endif  // PVSE_SIGNAL_MEL_H_
