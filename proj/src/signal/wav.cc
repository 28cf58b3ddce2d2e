// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "pvse/common/error.h"
#include "pvse/signal/waveform.h"

namespace pvse::signal {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t LoadU16(const uint8_t *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t LoadU32(const uint8_t *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<uint8_t> *out, uint16_t v) {
  out->push_back(static_cast<uint8_t>(v & 0xFF));
  out->push_back(static_cast<uint8_t>(v >> 8));
}

void PutU32(std::vector<uint8_t> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutTag(std::vector<uint8_t> *out, const char *tag) {
  out->insert(out->end(), tag, tag + 4);
}

}  // namespace

void ValidateWaveform(const Waveform &wave) {
  PVSE_CHECK(wave.sample_rate > 0, kInvalidArgument,
             "sample rate must be positive, got ", wave.sample_rate);
  for (size_t i = 0; i < wave.samples.size(); ++i) {
    PVSE_CHECK(std::isfinite(wave.samples[i]), kInvalidArgument,
               "non-finite sample at index ", i);
  }
}

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  PVSE_CHECK(in.good(), kIoFailure, "cannot open ", path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  PVSE_CHECK(bytes.size() >= 12, kMalformedFile, path, ": too short for RIFF header");
  PVSE_CHECK(std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
                 std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
             kMalformedFile, path, ": not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const uint8_t *data = nullptr;
  size_t data_bytes = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t *chunk = bytes.data() + pos;
    const uint32_t chunk_size = LoadU32(chunk + 4);
    const size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      PVSE_CHECK(chunk_size >= 16 && body + chunk_size <= bytes.size(),
                 kMalformedFile, path, ": truncated fmt chunk");
      format = LoadU16(chunk + 8);
      channels = LoadU16(chunk + 10);
      rate = LoadU32(chunk + 12);
      bits = LoadU16(chunk + 22);
      if (format == kFormatExtensible) {
        PVSE_CHECK(chunk_size >= 40, kMalformedFile, path,
                   ": truncated extensible fmt chunk");
        // First two bytes of the sub-format GUID carry the format tag.
        format = LoadU16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      PVSE_CHECK(body + chunk_size <= bytes.size(), kMalformedFile, path,
                 ": data chunk truncated (declared ", chunk_size, " bytes, ",
                 bytes.size() - body, " available)");
      data = bytes.data() + body;
      data_bytes = chunk_size;
      break;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  PVSE_CHECK(have_fmt, kMalformedFile, path, ": missing fmt chunk");
  PVSE_CHECK(data != nullptr, kMalformedFile, path, ": missing data chunk");
  PVSE_CHECK(rate > 0, kMalformedFile, path, ": zero sample rate");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  PVSE_CHECK(pcm16 || float32, kUnsupportedEncoding, path, ": format tag ",
             format, " with ", bits, " bits per sample");
  PVSE_CHECK(channels == 1 || channels == 2, kUnsupportedEncoding, path, ": ",
             channels, " channels");

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  PVSE_CHECK(data_bytes % frame_bytes == 0, kMalformedFile, path,
             ": data size not a multiple of the frame size");
  const size_t num_frames = data_bytes / frame_bytes;

  auto sample_at = [&](size_t idx) -> float {
    const uint8_t *p = data + idx * bytes_per_sample;
    if (pcm16) {
      return static_cast<float>(static_cast<int16_t>(LoadU16(p))) / 32768.0f;
    }
    float v;
    uint32_t raw = LoadU32(p);
    std::memcpy(&v, &raw, sizeof(v));
    return v;
  };

  Waveform wave;
  wave.sample_rate = static_cast<int>(rate);
  wave.samples.resize(num_frames);
  for (size_t i = 0; i < num_frames; ++i) {
    if (channels == 1) {
      wave.samples[i] = sample_at(i);
    } else {
      wave.samples[i] = 0.5f * (sample_at(2 * i) + sample_at(2 * i + 1));
    }
    PVSE_CHECK(std::isfinite(wave.samples[i]), kMalformedFile, path,
               ": non-finite sample at frame ", i);
  }
  return wave;
}

void WriteWav(const std::string &path, const Waveform &wave,
              WavEncoding encoding) {
  ValidateWaveform(wave);
  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const uint16_t bits = pcm16 ? 16 : 32;
  const uint32_t data_bytes = static_cast<uint32_t>(wave.size() * (bits / 8));
  const uint32_t fmt_size = pcm16 ? 16 : 18;

  std::vector<uint8_t> out;
  out.reserve(64 + data_bytes);
  PutTag(&out, "RIFF");
  const uint32_t riff_size =
      4 + (8 + fmt_size) + (pcm16 ? 0 : 12) + (8 + data_bytes);
  PutU32(&out, riff_size);
  PutTag(&out, "WAVE");
  PutTag(&out, "fmt ");
  PutU32(&out, fmt_size);
  PutU16(&out, pcm16 ? kFormatPcm : kFormatFloat);
  PutU16(&out, 1);
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate));
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate) * (bits / 8));
  PutU16(&out, bits / 8);
  PutU16(&out, bits);
  if (!pcm16) {
    PutU16(&out, 0);  // cbSize
    PutTag(&out, "fact");
    PutU32(&out, 4);
    PutU32(&out, static_cast<uint32_t>(wave.size()));
  }
  PutTag(&out, "data");
  PutU32(&out, data_bytes);
  for (float s : wave.samples) {
    if (pcm16) {
      const double clipped = std::clamp(static_cast<double>(s), -1.0, 1.0);
      const long q = std::lround(clipped * 32768.0);
      PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(
                       std::clamp<long>(q, -32768, 32767))));
    } else {
      uint32_t raw;
      std::memcpy(&raw, &s, sizeof(raw));
      PutU32(&out, raw);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  PVSE_CHECK(os.good(), kIoFailure, "cannot open ", path, " for writing");
  os.write(reinterpret_cast<const char *>(out.data()),
           static_cast<std::streamsize>(out.size()));
  PVSE_CHECK(os.good(), kIoFailure, "write failed for ", path);
}

}  // namespace pvse::signal
