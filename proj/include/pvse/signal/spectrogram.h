// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_SIGNAL_SPECTROGRAM_H_
#define PVSE_SIGNAL_SPECTROGRAM_H_

#include <vector>

#include "pvse/signal/stft.h"

namespace pvse::signal {

struct NormParams {
  double min_db = -100.0;
  double max_db = 20.0;
  double eps = 1e-8;
};

// Bounded encoding of a complex spectrogram. Each row holds num_bins
// normalized log-magnitudes followed by num_bins normalized phases, all in
// [0, 1].
struct NormSpectrogram {
  int num_frames = 0;
  int num_bins = 0;
  std::vector<double> values;
  NormParams norm;
  StftParams params;

  int width() const { return 2 * num_bins; }
  double &at(int t, int c) { return values[static_cast<size_t>(t) * width() + c]; }
  double at(int t, int c) const {
    return values[static_cast<size_t>(t) * width() + c];
  }
};

double EncodeMagnitude(double magnitude, const NormParams &norm = {});
double DecodeMagnitude(double value, const NormParams &norm = {});
// arg is taken in (-pi, pi]; arg(0) = 0.
double EncodePhase(std::complex<double> z);
double DecodePhase(double value);

NormSpectrogram EncodeSpectrogram(const ComplexSpectrogram &spec,
                                  const NormParams &norm = {});

// Inverse of EncodeSpectrogram. Throws InvalidArgument for values outside
// [0, 1].
ComplexSpectrogram DecodeSpectrogram(const NormSpectrogram &spec);

// Decodes magnitudes from `spec` but takes phase from `phase_source`.
ComplexSpectrogram DecodeWithPhase(const NormSpectrogram &spec,
                                   const ComplexSpectrogram &phase_source);

}  // namespace pvse::signal

#endif  // PVSE_SIGNAL_SPECTROGRAM_H_
