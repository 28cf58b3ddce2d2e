// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_LIPGEN_TEACHER_H_
#define PVSE_LIPGEN_TEACHER_H_

#include <string>

#include "pvse/lipgen/lip_frame.h"
#include "pvse/signal/mel.h"

namespace pvse::lipgen {

// Energy-driven mouth renderer. The aperture is
//   a = clip((E - E_floor) / (E_ceil - E_floor), 0, 1)
// with E the mean log-mel value over bands [4, 60] of the chunk,
// E_floor = log(1e-5) and E_ceil = E_floor + 8.
inline constexpr int kApertureBandLo = 4;
inline constexpr int kApertureBandHi = 60;  // inclusive
inline constexpr double kEnergyRange = 8.0;
inline constexpr double kHorizontalRadius = 20.0;
inline constexpr double kMinVerticalRadius = 2.0;
inline constexpr double kVerticalRadiusSpan = 12.0;

double TeacherAperture(const signal::MelChunk &chunk);

// Filled ellipse centered in the frame, anti-aliased by 4x4 supersampling.
LipFrame RenderMouth(double vertical_radius);

// Throws ShapeMismatch for a chunk that is not 16 x 80.
LipFrame TeacherGenerate(const signal::MelChunk &clean_chunk);

// Loads <dir>/frame_%05d.pgm and resizes it to 32 x 64. Throws MissingFrame
// or MalformedImage.
LipFrame TeacherFromFiles(const std::string &dir, int frame_index);

enum class TeacherKind { kSynthetic, kFileAdapter };

struct TeacherConfig {
  TeacherKind kind = TeacherKind::kSynthetic;
  // File adapter root; frames for clean file <stem>.wav live in <dir>/<stem>/.
  std::string dir;
};

// Teacher frames for a whole clean waveform (25 per second).
LipFrameSequence TeacherStream(const signal::Waveform &clean);

}  // namespace pvse::lipgen

#endif  // PVSE_LIPGEN_TEACHER_H_
