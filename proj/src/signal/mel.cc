// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/signal/mel.h"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "pvse/common/error.h"
#include "pvse/signal/stft.h"

namespace pvse::signal {
namespace {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

int MelParams::HopSamples() const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

int MelParams::WinSamples() const {
  return static_cast<int>(std::lround(win_ms * sample_rate / 1000.0));
}

std::vector<std::vector<double>> MelFilterbank(const MelParams &params) {
  PVSE_CHECK(params.n_mels > 0 && params.fmax > params.fmin && params.fmin >= 0 &&
                 params.fmax <= 0.5 * params.sample_rate,
             kInvalidArgument, "bad mel filterbank parameters");
  const int bins = params.fft_size / 2 + 1;
  const double lo = HzToMel(params.fmin), hi = HzToMel(params.fmax);
  std::vector<double> edges(static_cast<size_t>(params.n_mels) + 2);
  for (size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(lo + (hi - lo) * static_cast<double>(i) / (params.n_mels + 1));
  }
  const double bin_hz = static_cast<double>(params.sample_rate) / params.fft_size;
  std::vector<std::vector<double>> fb(params.n_mels, std::vector<double>(bins, 0.0));
  for (int m = 0; m < params.n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb[m][k] = w;
    }
  }
  return fb;
}

MelSpectrogram ComputeMel(const Waveform &wave, const MelParams &params) {
  PVSE_CHECK(wave.sample_rate == params.sample_rate, kInvalidArgument,
             "mel front-end expects ", params.sample_rate, " Hz input, got ",
             wave.sample_rate);
  const int hop = params.HopSamples();
  const int win = params.WinSamples();
  PVSE_CHECK(params.fft_size >= win, kInvalidArgument, "mel fft too small");
  const long len = static_cast<long>(wave.size());
  PVSE_CHECK(len >= hop, kEmptySignal, "signal shorter than one mel hop");

  const auto fb = MelFilterbank(params);
  const std::vector<double> window = HannWindow(win);
  double win_sum = 0.0;
  for (double w : window) win_sum += w;
  const double power_scale = 1.0 / (win_sum * win_sum);

  // Support of each filter, to skip zero weights.
  std::vector<std::pair<int, int>> support(fb.size());
  for (size_t m = 0; m < fb.size(); ++m) {
    int first = -1, last = -1;
    for (size_t k = 0; k < fb[m].size(); ++k) {
      if (fb[m][k] > 0.0) {
        if (first < 0) first = static_cast<int>(k);
        last = static_cast<int>(k);
      }
    }
    support[m] = {first, last};
  }

  MelSpectrogram mel;
  mel.num_frames = static_cast<int>(len / hop);
  mel.n_mels = params.n_mels;
  mel.values.resize(static_cast<size_t>(mel.num_frames) * mel.n_mels);

  Eigen::FFT<double> fft;
  std::vector<double> frame(static_cast<size_t>(params.fft_size), 0.0);
  std::vector<std::complex<double>> bins;
  std::vector<double> power(static_cast<size_t>(params.fft_size / 2 + 1));
  const long pad = win / 2;
  const double log_floor = std::log(params.floor);
  for (int t = 0; t < mel.num_frames; ++t) {
    const long start = static_cast<long>(t) * hop - pad;
    for (int i = 0; i < win; ++i) {
      frame[i] = window[i] * wave.samples[ReflectIndex(start + i, len)];
    }
    fft.fwd(bins, frame);
    for (size_t k = 0; k < power.size(); ++k) power[k] = std::norm(bins[k]) * power_scale;
    for (int m = 0; m < params.n_mels; ++m) {
      double e = 0.0;
      if (support[m].first >= 0) {
        for (int k = support[m].first; k <= support[m].second; ++k) e += fb[m][k] * power[k];
      }
      mel.values[static_cast<size_t>(t) * mel.n_mels + m] =
          static_cast<float>(e > params.floor ? std::log(e) : log_floor);
    }
  }
  return mel;
}

int LipFrameCenter(int lip_index, const MelParams &params, double fps) {
  const double seconds = lip_index / fps;
  return static_cast<int>(std::lround(seconds * 1000.0 / params.hop_ms));
}

MelChunk ChunkMel(const MelSpectrogram &mel, int lip_index,
                  const MelParams &params, double fps) {
  PVSE_CHECK(mel.n_mels == MelChunk::kBands, kShapeMismatch, "mel has ",
             mel.n_mels, " bands, chunk needs ", MelChunk::kBands);
  PVSE_CHECK(mel.num_frames > 0, kEmptySignal, "empty mel spectrogram");
  const int start = LipFrameCenter(lip_index, params, fps) - MelChunk::kFrames / 2;
  MelChunk chunk;
  for (int i = 0; i < MelChunk::kFrames; ++i) {
    const int src = std::clamp(start + i, 0, mel.num_frames - 1);
    std::copy_n(mel.values.begin() + static_cast<long>(src) * mel.n_mels, mel.n_mels,
                chunk.values.begin() + static_cast<long>(i) * MelChunk::kBands);
  }
  return chunk;
}

}  // namespace pvse::signal
