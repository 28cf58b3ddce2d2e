// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <vector>

#include "pvse/common/error.h"
#include "pvse/signal/waveform.h"

namespace pvse::signal {
namespace {

constexpr int kTaps = 64;
constexpr double kKaiserBeta = 8.6;
// Cutoff relative to the lower Nyquist rate.
constexpr double kCutoff = 0.9;

double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

Waveform Resample(const Waveform &wave, int target_rate) {
  PVSE_CHECK(target_rate > 0, kInvalidArgument, "target rate must be positive");
  PVSE_CHECK(wave.sample_rate > 0, kInvalidArgument, "source rate must be positive");
  if (target_rate == wave.sample_rate) return wave;

  const double ratio = static_cast<double>(target_rate) / wave.sample_rate;
  const auto out_len = static_cast<size_t>(std::llround(wave.size() * ratio));
  // Kernel is specified at the lower of the two rates, expressed in input
  // samples.
  const double scale = std::min(1.0, ratio);
  const double fc = kCutoff * scale;
  const double half_width = 0.5 * kTaps / scale;
  const double i0_beta = BesselI0(kKaiserBeta);
  const auto n_in = static_cast<long>(wave.size());

  // Output n sits at input position n * src / dst; its fractional offset
  // repeats every dst / gcd outputs, so kernels are built once per phase.
  const long g = std::gcd(wave.sample_rate, target_rate);
  const long src_step = wave.sample_rate / g;
  const long num_phases = target_rate / g;
  const long support = static_cast<long>(std::ceil(2.0 * half_width)) + 2;

  struct Kernel {
    long first = 0;  // input offset relative to floor(center)
    std::vector<double> taps;
  };
  std::vector<Kernel> kernels(static_cast<size_t>(num_phases));
  for (long phase = 0; phase < num_phases; ++phase) {
    const double frac =
        static_cast<double>((phase * src_step) % num_phases) / num_phases;
    Kernel &kern = kernels[static_cast<size_t>(phase)];
    kern.first = static_cast<long>(std::ceil(frac - half_width));
    for (long k = kern.first; k < kern.first + support; ++k) {
      const double tau = static_cast<double>(k) - frac;
      const double u = tau / half_width;
      if (std::abs(u) >= 1.0) {
        kern.taps.push_back(0.0);
        continue;
      }
      const double arg = std::numbers::pi * fc * tau;
      const double sinc = std::abs(arg) < 1e-12 ? 1.0 : std::sin(arg) / arg;
      kern.taps.push_back(fc * sinc *
                          BesselI0(kKaiserBeta * std::sqrt(1.0 - u * u)) /
                          i0_beta);
    }
  }

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);
  for (size_t n = 0; n < out_len; ++n) {
    const long whole = static_cast<long>(n) * src_step / num_phases;
    const Kernel &kern = kernels[static_cast<size_t>(n) % num_phases];
    double acc = 0.0;
    for (size_t j = 0; j < kern.taps.size(); ++j) {
      const long k = whole + kern.first + static_cast<long>(j);
      if (k < 0 || k >= n_in) continue;
      acc += kern.taps[j] * wave.samples[static_cast<size_t>(k)];
    }
    out.samples[n] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace pvse::signal
