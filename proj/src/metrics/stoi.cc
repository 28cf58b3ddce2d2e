// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "pvse/common/error.h"
#include "pvse/metrics/metrics.h"

namespace pvse::metrics {

namespace {

constexpr int kFs = 10000;
constexpr int kFrame = 256;
constexpr int kHop = kFrame / 2;
constexpr int kFft = 512;
constexpr int kBands = 15;
constexpr double kMinFreq = 150.0;
constexpr int kSegment = 30;
constexpr double kBeta = -15.0;
constexpr double kDynRange = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Hann of length n + 2 with the zero end points removed.
std::vector<double> StoiWindow() {
  std::vector<double> w(kFrame);
  for (int i = 0; i < kFrame; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (kFrame + 1));
  }
  return w;
}

void RemoveSilentFrames(const std::vector<double> &x, const std::vector<double> &y,
                        std::vector<double> *x_out, std::vector<double> *y_out) {
  const auto w = StoiWindow();
  std::vector<size_t> starts;
  for (size_t s = 0; s + kFrame <= x.size(); s += kHop) starts.push_back(s);
  std::vector<double> energy(starts.size());
  double max_energy = -std::numeric_limits<double>::infinity();
  for (size_t f = 0; f < starts.size(); ++f) {
    double acc = 0.0;
    for (int i = 0; i < kFrame; ++i) {
      const double v = w[i] * x[starts[f] + i];
      acc += v * v;
    }
    energy[f] = 20.0 * std::log10(std::sqrt(acc) + kEps);
    max_energy = std::max(max_energy, energy[f]);
  }
  std::vector<size_t> kept;
  for (size_t f = 0; f < starts.size(); ++f) {
    if (energy[f] > max_energy - kDynRange) kept.push_back(starts[f]);
  }
  const size_t len = kept.empty() ? 0 : (kept.size() - 1) * kHop + kFrame;
  x_out->assign(len, 0.0);
  y_out->assign(len, 0.0);
  for (size_t k = 0; k < kept.size(); ++k) {
    for (int i = 0; i < kFrame; ++i) {
      (*x_out)[k * kHop + i] += w[i] * x[kept[k] + i];
      (*y_out)[k * kHop + i] += w[i] * y[kept[k] + i];
    }
  }
}

// One-third-octave band index ranges [lo, hi) over FFT bins.
std::vector<std::pair<int, int>> ThirdOctaveBands() {
  const int nbins = kFft / 2 + 1;
  std::vector<double> freqs(nbins);
  for (int k = 0; k < nbins; ++k) freqs[k] = static_cast<double>(k) * kFs / kFft;
  auto nearest = [&](double f) {
    int best = 0;
    for (int k = 1; k < nbins; ++k) {
      if (std::abs(freqs[k] - f) < std::abs(freqs[best] - f)) best = k;
    }
    return best;
  };
  std::vector<std::pair<int, int>> bands;
  for (int b = 0; b < kBands; ++b) {
    const double cf = kMinFreq * std::pow(2.0, b / 3.0);
    bands.emplace_back(nearest(cf * std::pow(2.0, -1.0 / 6.0)),
                       nearest(cf * std::pow(2.0, 1.0 / 6.0)));
  }
  return bands;
}

// Band envelopes, [band][frame].
std::vector<std::vector<double>> BandEnvelopes(const std::vector<double> &x) {
  static const auto bands = ThirdOctaveBands();
  const auto w = StoiWindow();
  Eigen::FFT<double> fft;
  std::vector<double> frame(kFft);
  std::vector<std::complex<double>> spec;
  std::vector<std::vector<double>> env(kBands);
  for (size_t s = 0; s + kFrame <= x.size(); s += kHop) {
    std::fill(frame.begin(), frame.end(), 0.0);
    for (int i = 0; i < kFrame; ++i) frame[i] = w[i] * x[s + i];
    fft.fwd(spec, frame);
    for (int b = 0; b < kBands; ++b) {
      double acc = 0.0;
      for (int k = bands[b].first; k < bands[b].second; ++k) acc += std::norm(spec[k]);
      env[b].push_back(std::sqrt(acc));
    }
  }
  return env;
}

std::vector<double> ToDouble(const signal::Waveform &w) {
  return std::vector<double>(w.samples.begin(), w.samples.end());
}

}  // namespace

double Stoi(const signal::Waveform &clean, const signal::Waveform &processed) {
  PVSE_CHECK(clean.size() == processed.size(), kLengthMismatch, "signal lengths differ: ",
             clean.size(), " vs ", processed.size());
  PVSE_CHECK(clean.sample_rate == processed.sample_rate, kInvalidArgument,
             "sample rates differ");
  PVSE_CHECK(static_cast<double>(clean.size()) >= 0.384 * clean.sample_rate, kTooShort,
             "STOI needs at least 384 ms of audio");
  double clean_energy = 0.0;
  for (float v : clean.samples) clean_energy += static_cast<double>(v) * v;
  PVSE_CHECK(clean_energy > 0.0, kSilentReference, "clean reference is silent");

  const signal::Waveform x10 = signal::Resample(clean, kFs);
  const signal::Waveform y10 = signal::Resample(processed, kFs);
  std::vector<double> x, y;
  RemoveSilentFrames(ToDouble(x10), ToDouble(y10), &x, &y);
  const auto xe = BandEnvelopes(x);
  const auto ye = BandEnvelopes(y);
  const int frames = static_cast<int>(xe[0].size());
  PVSE_CHECK(frames >= kSegment, kTooShort, "only ", frames,
             " non-silent STOI frames, need ", kSegment);

  const double clip = 1.0 + std::pow(10.0, -kBeta / 20.0);
  double total = 0.0;
  int count = 0;
  std::vector<double> xs(kSegment), ys(kSegment);
  for (int m = kSegment; m <= frames; ++m) {
    for (int b = 0; b < kBands; ++b) {
      double xn = 0.0, yn = 0.0;
      for (int j = 0; j < kSegment; ++j) {
        xs[j] = xe[b][m - kSegment + j];
        ys[j] = ye[b][m - kSegment + j];
        xn += xs[j] * xs[j];
        yn += ys[j] * ys[j];
      }
      const double scale = std::sqrt(xn) / (std::sqrt(yn) + kEps);
      double xm = 0.0, ym = 0.0;
      for (int j = 0; j < kSegment; ++j) {
        ys[j] = std::min(ys[j] * scale, xs[j] * clip);
        xm += xs[j];
        ym += ys[j];
      }
      xm /= kSegment;
      ym /= kSegment;
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (int j = 0; j < kSegment; ++j) {
        sxy += (xs[j] - xm) * (ys[j] - ym);
        sxx += (xs[j] - xm) * (xs[j] - xm);
        syy += (ys[j] - ym) * (ys[j] - ym);
      }
      total += sxy / (std::sqrt(sxx) * std::sqrt(syy) + kEps);
      ++count;
    }
  }
  // Negative mean correlation only occurs for adversarial inputs.
  return std::clamp(total / count, 0.0, 1.0);
}

}  // namespace pvse::metrics
