// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_LIPGEN_LIP_FRAME_H_
#define PVSE_LIPGEN_LIP_FRAME_H_

#include <string>
#include <vector>

namespace pvse::lipgen {

inline constexpr int kFrameHeight = 32;
inline constexpr int kFrameWidth = 64;
inline constexpr int kFramePixels = kFrameHeight * kFrameWidth;
inline constexpr double kFps = 25.0;

// Grayscale lower-face image, row-major, pixels in [0, 1].
struct LipFrame {
  std::vector<float> pixels = std::vector<float>(kFramePixels, 0.0f);

  float at(int row, int col) const { return pixels[row * kFrameWidth + col]; }
  float &at(int row, int col) { return pixels[row * kFrameWidth + col]; }
};

struct LipFrameSequence {
  std::vector<LipFrame> frames;
  double fps = kFps;

  size_t size() const { return frames.size(); }
};

// Lip frames covering `num_samples` of audio at `sample_rate`.
int NumLipFrames(size_t num_samples, int sample_rate);

// 8-bit binary PGM (P5) I/O. Read returns values scaled to [0, 1] along with
// the stored size.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<float> pixels;
};
GrayImage ReadPgm(const std::string &path);
void WritePgm(const std::string &path, const GrayImage &image);

// Bilinear resize (pixel-center aligned).
GrayImage ResizeBilinear(const GrayImage &image, int height, int width);

}  // namespace pvse::lipgen

#endif  // PVSE_LIPGEN_LIP_FRAME_H_
