// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_LIPGEN_STREAM_H_
#define PVSE_LIPGEN_STREAM_H_

#include <vector>

#include "pvse/lipgen/lip_frame.h"
#include "pvse/lipgen/student.h"
#include "pvse/signal/waveform.h"

namespace pvse::lipgen {

// Student frames for a noisy waveform, 25 per second of audio.
LipFrameSequence LipStream(const signal::Waveform &noisy, const StudentModel &model);

struct ApertureSeries {
  std::vector<double> values;
  double fps = kFps;
};

inline constexpr int kApertureColumnLo = 30;
inline constexpr int kApertureColumnHi = 34;  // inclusive, 5 columns

// Rows whose mean over the center column block exceeds 0.5.
double FrameAperture(const LipFrame &frame);
ApertureSeries ApertureTrajectory(const LipFrameSequence &seq);

// Pearson correlation; 0 when either series is constant. Throws
// LengthMismatch for unequal lengths and TooShort below 8 samples.
double SyncProxy(const std::vector<double> &a, const std::vector<double> &b);

}  // namespace pvse::lipgen

#endif  // PVSE_LIPGEN_STREAM_H_
