// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/lipgen/lip_frame.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "pvse/common/error.h"

namespace pvse::lipgen {

int NumLipFrames(size_t num_samples, int sample_rate) {
  return static_cast<int>(static_cast<double>(num_samples) * kFps / sample_rate + 1e-9);
}

GrayImage ReadPgm(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  PVSE_CHECK(is.good(), kMissingFrame, "cannot open ", path);
  const std::string bytes((std::istreambuf_iterator<char>(is)),
                          std::istreambuf_iterator<char>());
  size_t pos = 0;
  // Header tokens are separated by whitespace; '#' starts a comment line.
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  auto to_int = [&](const std::string &tok) {
    PVSE_CHECK(!tok.empty() && std::all_of(tok.begin(), tok.end(), ::isdigit),
               kMalformedImage, path, ": bad header token '", tok, "'");
    return std::stoi(tok);
  };
  PVSE_CHECK(next_token() == "P5", kMalformedImage, path, ": not a binary PGM");
  GrayImage img;
  img.width = to_int(next_token());
  img.height = to_int(next_token());
  const int maxval = to_int(next_token());
  PVSE_CHECK(img.width > 0 && img.height > 0, kMalformedImage, path, ": empty image");
  PVSE_CHECK(maxval > 0 && maxval < 256, kMalformedImage, path,
             ": only 8-bit PGM supported (maxval ", maxval, ")");
  ++pos;  // single whitespace after maxval
  const size_t count = static_cast<size_t>(img.width) * img.height;
  PVSE_CHECK(bytes.size() >= pos + count, kMalformedImage, path, ": truncated pixel data");
  img.pixels.resize(count);
  for (size_t i = 0; i < count; ++i) {
    img.pixels[i] = static_cast<float>(static_cast<unsigned char>(bytes[pos + i])) /
                    static_cast<float>(maxval);
  }
  return img;
}

void WritePgm(const std::string &path, const GrayImage &image) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  PVSE_CHECK(os.good(), kIoFailure, "cannot open ", path, " for writing");
  os << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  for (float v : image.pixels) {
    os.put(static_cast<char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
  }
  PVSE_CHECK(os.good(), kIoFailure, "write failed for ", path);
}

GrayImage ResizeBilinear(const GrayImage &image, int height, int width) {
  GrayImage out;
  out.height = height;
  out.width = width;
  out.pixels.resize(static_cast<size_t>(height) * width);
  const double sy = static_cast<double>(image.height) / height;
  const double sx = static_cast<double>(image.width) / width;
  for (int r = 0; r < height; ++r) {
    const double y = std::clamp((r + 0.5) * sy - 0.5, 0.0, image.height - 1.0);
    const int y0 = static_cast<int>(y), y1 = std::min(y0 + 1, image.height - 1);
    const double fy = y - y0;
    for (int c = 0; c < width; ++c) {
      const double x = std::clamp((c + 0.5) * sx - 0.5, 0.0, image.width - 1.0);
      const int x0 = static_cast<int>(x), x1 = std::min(x0 + 1, image.width - 1);
      const double fx = x - x0;
      auto px = [&](int yy, int xx) {
        return static_cast<double>(image.pixels[static_cast<size_t>(yy) * image.width + xx]);
      };
      const double top = px(y0, x0) * (1 - fx) + px(y0, x1) * fx;
      const double bottom = px(y1, x0) * (1 - fx) + px(y1, x1) * fx;
      out.pixels[static_cast<size_t>(r) * width + c] =
          static_cast<float>(top * (1 - fy) + bottom * fy);
    }
  }
  return out;
}

}  // namespace pvse::lipgen
