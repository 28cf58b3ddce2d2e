// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/lipgen/stream.h"

#include <algorithm>
#include <cmath>

#include "pvse/common/error.h"
#include "pvse/signal/mel.h"

namespace pvse::lipgen {

LipFrameSequence LipStream(const signal::Waveform &noisy, const StudentModel &model) {
  const auto mel = signal::ComputeMel(noisy);
  const int n = NumLipFrames(noisy.size(), noisy.sample_rate);
  std::vector<signal::MelChunk> chunks;
  chunks.reserve(n);
  for (int i = 0; i < n; ++i) chunks.push_back(signal::ChunkMel(mel, i));
  LipFrameSequence seq;
  seq.frames = StudentForwardBatch(chunks, model);
  return seq;
}

double FrameAperture(const LipFrame &frame) {
  constexpr int kWidth = kApertureColumnHi - kApertureColumnLo + 1;
  int rows = 0;
  for (int r = 0; r < kFrameHeight; ++r) {
    double acc = 0.0;
    for (int c = kApertureColumnLo; c <= kApertureColumnHi; ++c) acc += frame.at(r, c);
    if (acc / kWidth > 0.5) ++rows;
  }
  return rows;
}

ApertureSeries ApertureTrajectory(const LipFrameSequence &seq) {
  ApertureSeries series;
  series.fps = seq.fps;
  series.values.reserve(seq.size());
  for (const auto &f : seq.frames) series.values.push_back(FrameAperture(f));
  return series;
}

double SyncProxy(const std::vector<double> &a, const std::vector<double> &b) {
  PVSE_CHECK(a.size() == b.size(), kLengthMismatch, "series lengths differ: ", a.size(),
             " vs ", b.size());
  PVSE_CHECK(a.size() >= 8, kTooShort, "sync proxy needs at least 8 samples, got ", a.size());
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace pvse::lipgen
