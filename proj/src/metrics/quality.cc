// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "pvse/common/error.h"
#include "pvse/metrics/metrics.h"
#include "pvse/signal/spectrogram.h"
#include "pvse/signal/stft.h"

namespace pvse::metrics {

namespace {

void CheckPair(const signal::Waveform &clean, const signal::Waveform &processed) {
  PVSE_CHECK(clean.size() == processed.size(), kLengthMismatch, "signal lengths differ: ",
             clean.size(), " vs ", processed.size());
  PVSE_CHECK(clean.sample_rate == processed.sample_rate, kInvalidArgument,
             "sample rates differ");
}

int FrameSamples(int sample_rate) { return static_cast<int>(std::lround(0.032 * sample_rate)); }

// Hann without zero end points, as in the classical speech quality tools.
std::vector<double> QualityWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (i + 1) / (n + 1)));
  }
  return w;
}

constexpr int kLpcOrder = 10;

std::array<double, kLpcOrder + 1> Autocorrelation(const std::vector<double> &x) {
  std::array<double, kLpcOrder + 1> r{};
  for (int lag = 0; lag <= kLpcOrder; ++lag) {
    double acc = 0.0;
    for (size_t i = lag; i < x.size(); ++i) acc += x[i] * x[i - lag];
    r[lag] = acc;
  }
  return r;
}

// Levinson-Durbin; returns a = [1, a1, ..., ap].
std::array<double, kLpcOrder + 1> Lpc(const std::array<double, kLpcOrder + 1> &r) {
  std::array<double, kLpcOrder + 1> a{};
  a[0] = 1.0;
  double err = r[0];
  if (err <= 0.0) return a;
  std::array<double, kLpcOrder + 1> prev{};
  for (int i = 1; i <= kLpcOrder; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += a[j] * r[i - j];
    const double k = -acc / err;
    prev = a;
    for (int j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
    a[i] = k;
    err *= (1.0 - k * k);
    if (err <= 0.0) break;
  }
  return a;
}

// a R aᵀ for the symmetric Toeplitz matrix built from r.
double QuadraticForm(const std::array<double, kLpcOrder + 1> &a,
                     const std::array<double, kLpcOrder + 1> &r) {
  double acc = 0.0;
  for (int i = 0; i <= kLpcOrder; ++i) {
    for (int j = 0; j <= kLpcOrder; ++j) acc += a[i] * r[std::abs(i - j)] * a[j];
  }
  return acc;
}

}  // namespace

double SiSdr(const signal::Waveform &clean, const signal::Waveform &processed) {
  CheckPair(clean, processed);
  double ss = 0.0, sp = 0.0;
  for (size_t i = 0; i < clean.size(); ++i) {
    ss += static_cast<double>(clean.samples[i]) * clean.samples[i];
    sp += static_cast<double>(clean.samples[i]) * processed.samples[i];
  }
  PVSE_CHECK(ss > 0.0, kSilentReference, "clean reference is silent");
  const double alpha = sp / ss;
  double target = 0.0, error = 0.0;
  for (size_t i = 0; i < clean.size(); ++i) {
    const double t = alpha * clean.samples[i];
    const double e = t - processed.samples[i];
    target += t * t;
    error += e * e;
  }
  if (error <= 0.0) return kSiSdrCap;
  if (target <= 0.0) return -kSiSdrCap;
  return std::clamp(10.0 * std::log10(target / error), -kSiSdrCap, kSiSdrCap);
}

double SegSnr(const signal::Waveform &clean, const signal::Waveform &processed) {
  CheckPair(clean, processed);
  constexpr double kMin = -10.0, kMax = 35.0, kSilence = 1e-8;
  const int frame = FrameSamples(clean.sample_rate), hop = frame / 2;
  double total = 0.0;
  int count = 0;
  for (size_t s = 0; s + frame <= clean.size(); s += hop) {
    double pc = 0.0, pe = 0.0;
    for (int i = 0; i < frame; ++i) {
      const double c = clean.samples[s + i];
      const double e = c - processed.samples[s + i];
      pc += c * c;
      pe += e * e;
    }
    pc /= frame;
    pe /= frame;
    if (pc < kSilence) continue;
    const double snr = pe > 0.0 ? 10.0 * std::log10(pc / pe) : kMax;
    total += std::clamp(snr, kMin, kMax);
    ++count;
  }
  PVSE_CHECK(count > 0, kNoValidFrames, "no frame has clean power above ", kSilence);
  return total / count;
}

double Llr(const signal::Waveform &clean, const signal::Waveform &processed) {
  CheckPair(clean, processed);
  const int frame = FrameSamples(clean.sample_rate), hop = frame / 2;
  PVSE_CHECK(clean.size() >= static_cast<size_t>(frame + 2 * hop), kTooShort,
             "LLR needs at least 3 frames");
  const auto w = QualityWindow(frame);
  std::vector<double> xc(frame), xp(frame), values;
  for (size_t s = 0; s + frame <= clean.size(); s += hop) {
    for (int i = 0; i < frame; ++i) {
      xc[i] = w[i] * clean.samples[s + i];
      xp[i] = w[i] * processed.samples[s + i];
    }
    const auto rc = Autocorrelation(xc);
    if (rc[0] <= 1e-10) continue;  // silent clean frame, LPC undefined
    const auto rp = Autocorrelation(xp);
    const auto ac = Lpc(rc);
    const auto ap = Lpc(rp);
    const double num = QuadraticForm(ap, rc);
    const double den = QuadraticForm(ac, rc);
    if (!(den > 0.0) || !(num > 0.0)) continue;
    values.push_back(std::max(0.0, std::log(num / den)));
  }
  PVSE_CHECK(!values.empty(), kNoValidFrames, "every clean frame is silent");
  std::sort(values.begin(), values.end());
  const size_t keep =
      std::max<size_t>(1, static_cast<size_t>(std::lround(0.95 * values.size())));
  double total = 0.0;
  for (size_t i = 0; i < keep; ++i) total += values[i];
  return total / static_cast<double>(keep);
}

double Wss(const signal::Waveform &clean, const signal::Waveform &processed) {
  CheckPair(clean, processed);
  constexpr int kCrit = 25;
  constexpr double kMaxK = 20.0, kLocMaxK = 1.0;
  static const double kCenter[kCrit] = {
      50.0,     120.0,    190.0,    260.0,    330.0,    400.0,    470.0,
      540.0,    617.372,  703.378,  798.717,  904.128,  1020.38,  1148.30,
      1288.72,  1442.54,  1610.70,  1794.16,  1993.93,  2211.08,  2446.71,
      2701.97,  2978.04,  3276.17,  3597.63};
  static const double kBandwidth[kCrit] = {
      70.0,     70.0,     70.0,     70.0,     70.0,     70.0,     70.0,
      77.3724,  86.0056,  95.3398,  105.411,  116.256,  127.914,  140.423,
      153.823,  168.154,  183.457,  199.776,  217.153,  235.631,  255.255,
      276.072,  298.126,  321.465,  346.136};

  const int frame = FrameSamples(clean.sample_rate), hop = frame / 4;
  PVSE_CHECK(clean.size() >= static_cast<size_t>(frame), kTooShort,
             "WSS needs at least one 32 ms frame");
  int nfft = 1;
  while (nfft < 2 * frame) nfft *= 2;
  const int half = nfft / 2;
  const double max_freq = clean.sample_rate / 2.0;

  std::vector<std::vector<double>> filters(kCrit, std::vector<double>(half));
  const double min_factor = std::exp(-30.0 / (2.0 * 2.303));
  for (int b = 0; b < kCrit; ++b) {
    const double f0 = kCenter[b] / max_freq * half;
    const double bw = kBandwidth[b] / max_freq * half;
    const double norm = std::log(kBandwidth[0]) - std::log(kBandwidth[b]);
    for (int j = 0; j < half; ++j) {
      const double d = (j - std::floor(f0)) / bw;
      const double v = std::exp(-11.0 * d * d + norm);
      filters[b][j] = v > min_factor ? v : 0.0;
    }
  }

  const auto w = QualityWindow(frame);
  Eigen::FFT<double> fft;
  std::vector<double> buf(nfft);
  std::vector<std::complex<double>> spec;
  auto band_energy = [&](const std::vector<float> &x, size_t start, double *out) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int i = 0; i < frame; ++i) buf[i] = w[i] * x[start + i];
    fft.fwd(spec, buf);
    double acc[kCrit];
    double peak = 0.0;
    for (int b = 0; b < kCrit; ++b) {
      acc[b] = 0.0;
      for (int j = 0; j < half; ++j) acc[b] += filters[b][j] * std::norm(spec[j]);
      peak = std::max(peak, acc[b]);
    }
    // Floor 100 dB under the frame's loudest band, so a gain shifts every
    // band by the same amount. An all-zero frame maps to flat 0 dB.
    const double floor = peak > 0.0 ? peak * 1e-10 : 1.0;
    for (int b = 0; b < kCrit; ++b) out[b] = 10.0 * std::log10(std::max(acc[b], floor));
  };
  // 1-based helpers mirror the reference peak search.
  auto weights = [&](const double *energy, const double *slope, double *out) {
    const double db_max = *std::max_element(energy, energy + kCrit);
    for (int i = 1; i <= kCrit - 1; ++i) {
      int n = i;
      double peak;
      if (slope[i - 1] > 0) {
        while (n < kCrit && slope[n - 1] > 0) ++n;
        peak = energy[n - 2];
      } else {
        while (n > 0 && slope[n - 1] <= 0) --n;
        peak = energy[n];
      }
      const double wmax = kMaxK / (kMaxK + db_max - energy[i - 1]);
      const double wloc = kLocMaxK / (kLocMaxK + peak - energy[i - 1]);
      out[i - 1] = wmax * wloc;
    }
  };

  double total = 0.0;
  int count = 0;
  double ec[kCrit], ep[kCrit], sc[kCrit - 1], sp[kCrit - 1], wc[kCrit - 1], wp[kCrit - 1];
  for (size_t s = 0; s + frame <= clean.size(); s += hop) {
    band_energy(clean.samples, s, ec);
    band_energy(processed.samples, s, ep);
    for (int b = 0; b + 1 < kCrit; ++b) {
      sc[b] = ec[b + 1] - ec[b];
      sp[b] = ep[b + 1] - ep[b];
    }
    weights(ec, sc, wc);
    weights(ep, sp, wp);
    double num = 0.0, den = 0.0;
    for (int b = 0; b + 1 < kCrit; ++b) {
      const double wb = 0.5 * (wc[b] + wp[b]);
      const double d = sc[b] - sp[b];
      num += wb * d * d;
      den += wb;
    }
    total += num / den;
    ++count;
  }
  return total / count;
}

double SpectralL1(const signal::Waveform &clean, const signal::Waveform &processed) {
  CheckPair(clean, processed);
  const auto a = signal::EncodeSpectrogram(signal::Stft(clean));
  const auto b = signal::EncodeSpectrogram(signal::Stft(processed));
  double acc = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) acc += std::abs(a.values[i] - b.values[i]);
  return a.values.empty() ? 0.0 : acc / static_cast<double>(a.values.size());
}

}  // namespace pvse::metrics
