// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/lipgen/teacher.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "pvse/common/error.h"

namespace pvse::lipgen {

double TeacherAperture(const signal::MelChunk &chunk) {
  PVSE_CHECK(chunk.values.size() ==
                 static_cast<size_t>(signal::MelChunk::kFrames) * signal::MelChunk::kBands,
             kShapeMismatch, "mel chunk must be 16x80, got ", chunk.values.size(), " values");
  double acc = 0.0;
  int count = 0;
  for (int t = 0; t < signal::MelChunk::kFrames; ++t) {
    for (int m = kApertureBandLo; m <= kApertureBandHi; ++m) {
      acc += chunk.at(t, m);
      ++count;
    }
  }
  const double energy = acc / count;
  const double floor = std::log(1e-5);
  return std::clamp((energy - floor) / kEnergyRange, 0.0, 1.0);
}

LipFrame RenderMouth(double vertical_radius) {
  constexpr int kSub = 4;
  const double cy = kFrameHeight / 2.0, cx = kFrameWidth / 2.0;
  const double ry2 = vertical_radius * vertical_radius;
  const double rx2 = kHorizontalRadius * kHorizontalRadius;
  LipFrame frame;
  for (int r = 0; r < kFrameHeight; ++r) {
    for (int c = 0; c < kFrameWidth; ++c) {
      int inside = 0;
      for (int i = 0; i < kSub; ++i) {
        const double dy = r + (i + 0.5) / kSub - cy;
        for (int j = 0; j < kSub; ++j) {
          const double dx = c + (j + 0.5) / kSub - cx;
          if (dx * dx / rx2 + dy * dy / ry2 <= 1.0) ++inside;
        }
      }
      frame.at(r, c) = static_cast<float>(inside) / (kSub * kSub);
    }
  }
  return frame;
}

LipFrame TeacherGenerate(const signal::MelChunk &clean_chunk) {
  const double a = TeacherAperture(clean_chunk);
  return RenderMouth(kMinVerticalRadius + kVerticalRadiusSpan * a);
}

LipFrame TeacherFromFiles(const std::string &dir, int frame_index) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%05d.pgm", frame_index);
  const auto path = (std::filesystem::path(dir) / name).string();
  std::error_code ec;
  PVSE_CHECK(frame_index >= 0 && std::filesystem::is_regular_file(path, ec), kMissingFrame,
             "no teacher frame ", path);
  const GrayImage resized = ResizeBilinear(ReadPgm(path), kFrameHeight, kFrameWidth);
  LipFrame frame;
  frame.pixels = resized.pixels;
  return frame;
}

LipFrameSequence TeacherStream(const signal::Waveform &clean) {
  const auto mel = signal::ComputeMel(clean);
  LipFrameSequence seq;
  const int n = NumLipFrames(clean.size(), clean.sample_rate);
  for (int i = 0; i < n; ++i) seq.frames.push_back(TeacherGenerate(signal::ChunkMel(mel, i)));
  return seq;
}

}  // namespace pvse::lipgen
