// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/signal/stft.h"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "pvse/common/error.h"

namespace pvse::signal {
namespace {

constexpr double kMinWindowSum = 1e-10;

Eigen::FFT<double> &ThreadFft() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

int StftParams::WinSamples() const {
  return static_cast<int>(std::lround(win_ms * sample_rate / 1000.0));
}

int StftParams::HopSamples() const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

void StftParams::Validate() const {
  PVSE_CHECK(sample_rate > 0 && HopSamples() > 0 && WinSamples() > 0,
             kInvalidArgument, "bad STFT timing parameters");
  PVSE_CHECK(fft_size >= WinSamples(), kInvalidArgument, "fft size ", fft_size,
             " smaller than window ", WinSamples());
}

std::vector<double> HannWindow(int n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

long ReflectIndex(long idx, long len) {
  if (len == 1) return 0;
  const long period = 2 * (len - 1);
  idx %= period;
  if (idx < 0) idx += period;
  return idx < len ? idx : period - idx;
}

ComplexSpectrogram Stft(const Waveform &wave, const StftParams &params) {
  params.Validate();
  PVSE_CHECK(wave.sample_rate == params.sample_rate, kInvalidArgument,
             "waveform rate ", wave.sample_rate, " != STFT rate ",
             params.sample_rate);
  const int win = params.WinSamples();
  const int hop = params.HopSamples();
  const long len = static_cast<long>(wave.size());
  PVSE_CHECK(len >= hop, kEmptySignal, "signal of ", len,
             " samples is shorter than one hop (", hop, ")");

  ComplexSpectrogram spec;
  spec.params = params;
  spec.num_frames = static_cast<int>(len / hop);
  spec.num_bins = params.NumBins();
  spec.data.resize(static_cast<size_t>(spec.num_frames) * spec.num_bins);

  const std::vector<double> window = HannWindow(win);
  const long pad = win / 2;
  std::vector<double> frame(static_cast<size_t>(params.fft_size), 0.0);
  std::vector<std::complex<double>> bins;
  auto &fft = ThreadFft();
  for (int t = 0; t < spec.num_frames; ++t) {
    const long start = static_cast<long>(t) * hop - pad;
    for (int i = 0; i < win; ++i) {
      frame[i] = window[i] * wave.samples[ReflectIndex(start + i, len)];
    }
    fft.fwd(bins, frame);
    for (int k = 0; k < spec.num_bins; ++k) spec.at(t, k) = bins[k];
  }
  return spec;
}

Waveform Istft(const ComplexSpectrogram &spec) {
  const StftParams &params = spec.params;
  params.Validate();
  PVSE_CHECK(spec.num_bins == params.NumBins() &&
                 spec.data.size() ==
                     static_cast<size_t>(spec.num_frames) * spec.num_bins,
             kShapeMismatch, "spectrogram shape inconsistent with parameters");
  const int win = params.WinSamples();
  const int hop = params.HopSamples();
  const int n_fft = params.fft_size;
  const long pad = win / 2;
  const long out_len = static_cast<long>(spec.num_frames) * hop;

  const std::vector<double> window = HannWindow(win);
  const long span = static_cast<long>(spec.num_frames - 1) * hop + win;
  std::vector<double> acc(static_cast<size_t>(std::max(span, out_len + pad)), 0.0);
  std::vector<double> norm(acc.size(), 0.0);

  std::vector<std::complex<double>> full(static_cast<size_t>(n_fft));
  std::vector<double> frame;
  auto &fft = ThreadFft();
  for (int t = 0; t < spec.num_frames; ++t) {
    for (int k = 0; k < spec.num_bins; ++k) full[k] = spec.at(t, k);
    // Hermitian completion; imaginary parts of DC/Nyquist are discarded.
    full[0] = full[0].real();
    if (n_fft % 2 == 0) full[n_fft / 2] = full[n_fft / 2].real();
    for (int k = spec.num_bins; k < n_fft; ++k) full[k] = std::conj(full[n_fft - k]);
    fft.inv(frame, full);
    const size_t start = static_cast<size_t>(t) * hop;
    for (int i = 0; i < win; ++i) {
      acc[start + i] += window[i] * frame[i];
      norm[start + i] += window[i] * window[i];
    }
  }

  Waveform out;
  out.sample_rate = params.sample_rate;
  out.samples.resize(static_cast<size_t>(out_len));
  for (long n = 0; n < out_len; ++n) {
    const size_t p = static_cast<size_t>(n + pad);
    PVSE_CHECK(norm[p] >= kMinWindowSum, kDegenerateNormalization,
               "window sum ", norm[p], " at sample ", n);
    out.samples[static_cast<size_t>(n)] = static_cast<float>(acc[p] / norm[p]);
  }
  return out;
}

}  // namespace pvse::signal
