// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_SIGNAL_STFT_H_
#define PVSE_SIGNAL_STFT_H_

#include <complex>
#include <vector>

#include "pvse/signal/waveform.h"

namespace pvse::signal {

struct StftParams {
  int sample_rate = kDefaultSampleRate;
  double win_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 512;

  int WinSamples() const;
  int HopSamples() const;
  int NumBins() const { return fft_size / 2 + 1; }
  // Throws InvalidArgument when the window does not fit the FFT.
  void Validate() const;
};

// Frame-major T x bins complex matrix.
struct ComplexSpectrogram {
  int num_frames = 0;
  int num_bins = 0;
  std::vector<std::complex<double>> data;
  StftParams params;

  std::complex<double> &at(int t, int k) {
    return data[static_cast<size_t>(t) * num_bins + k];
  }
  const std::complex<double> &at(int t, int k) const {
    return data[static_cast<size_t>(t) * num_bins + k];
  }
};

// Periodic Hann window of length n.
std::vector<double> HannWindow(int n);

// Maps an index of a signal extended by reflection (no edge repeat) back into
// [0, len). Valid for any len >= 1.
long ReflectIndex(long idx, long len);

// Centered STFT: reflect-pads win/2 samples on each side and keeps
// floor(len / hop) frames. Hann window, zero-padded to fft_size.
ComplexSpectrogram Stft(const Waveform &wave, const StftParams &params = {});

// Weighted overlap-add with squared-window normalization. Returns
// num_frames * hop samples.
Waveform Istft(const ComplexSpectrogram &spec);

}  // namespace pvse::signal

#endif  // PVSE_SIGNAL_STFT_H_
