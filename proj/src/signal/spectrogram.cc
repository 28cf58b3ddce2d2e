// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/signal/spectrogram.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pvse/common/error.h"

namespace pvse::signal {

double EncodeMagnitude(double magnitude, const NormParams &norm) {
  const double db = 20.0 * std::log10(magnitude + norm.eps);
  return std::clamp((db - norm.min_db) / (norm.max_db - norm.min_db), 0.0, 1.0);
}

double DecodeMagnitude(double value, const NormParams &norm) {
  const double db = value * (norm.max_db - norm.min_db) + norm.min_db;
  return std::max(0.0, std::pow(10.0, db / 20.0) - norm.eps);
}

double EncodePhase(std::complex<double> z) {
  double phi = (z.real() == 0.0 && z.imag() == 0.0) ? 0.0 : std::arg(z);
  if (phi <= -std::numbers::pi) phi = std::numbers::pi;
  return (phi + std::numbers::pi) / (2.0 * std::numbers::pi);
}

double DecodePhase(double value) {
  return value * 2.0 * std::numbers::pi - std::numbers::pi;
}

NormSpectrogram EncodeSpectrogram(const ComplexSpectrogram &spec,
                                  const NormParams &norm) {
  NormSpectrogram out;
  out.num_frames = spec.num_frames;
  out.num_bins = spec.num_bins;
  out.norm = norm;
  out.params = spec.params;
  out.values.resize(static_cast<size_t>(out.num_frames) * out.width());
  for (int t = 0; t < spec.num_frames; ++t) {
    for (int k = 0; k < spec.num_bins; ++k) {
      const std::complex<double> z = spec.at(t, k);
      out.at(t, k) = EncodeMagnitude(std::abs(z), norm);
      out.at(t, spec.num_bins + k) = EncodePhase(z);
    }
  }
  return out;
}

namespace {

void CheckRange(const NormSpectrogram &spec) {
  PVSE_CHECK(spec.values.size() ==
                 static_cast<size_t>(spec.num_frames) * spec.width(),
             kShapeMismatch, "normalized spectrogram has ", spec.values.size(),
             " values for ", spec.num_frames, "x", spec.width());
  for (double v : spec.values) {
    PVSE_CHECK(v >= 0.0 && v <= 1.0, kInvalidArgument,
               "normalized value ", v, " outside [0, 1]");
  }
}

}  // namespace

ComplexSpectrogram DecodeSpectrogram(const NormSpectrogram &spec) {
  CheckRange(spec);
  ComplexSpectrogram out;
  out.num_frames = spec.num_frames;
  out.num_bins = spec.num_bins;
  out.params = spec.params;
  out.data.resize(static_cast<size_t>(out.num_frames) * out.num_bins);
  for (int t = 0; t < spec.num_frames; ++t) {
    for (int k = 0; k < spec.num_bins; ++k) {
      const double mag = DecodeMagnitude(spec.at(t, k), spec.norm);
      out.at(t, k) = std::polar(mag, DecodePhase(spec.at(t, spec.num_bins + k)));
    }
  }
  return out;
}

ComplexSpectrogram DecodeWithPhase(const NormSpectrogram &spec,
                                   const ComplexSpectrogram &phase_source) {
  CheckRange(spec);
  PVSE_CHECK(phase_source.num_frames == spec.num_frames &&
                 phase_source.num_bins == spec.num_bins,
             kShapeMismatch, "phase source shape differs from spectrogram");
  ComplexSpectrogram out = DecodeSpectrogram(spec);
  for (int t = 0; t < spec.num_frames; ++t) {
    for (int k = 0; k < spec.num_bins; ++k) {
      const std::complex<double> z = phase_source.at(t, k);
      const double phi = (z == std::complex<double>(0.0)) ? 0.0 : std::arg(z);
      out.at(t, k) = std::polar(std::abs(out.at(t, k)), phi);
    }
  }
  return out;
}

}  // namespace pvse::signal
