// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "pvse/common/error.h"
#include "pvse/signal/mel.h"
#include "pvse/signal/spectrogram.h"
#include "pvse/signal/stft.h"
#include "pvse/signal/waveform.h"
#include "test_util.h"

using namespace pvse;
using namespace pvse::signal;

namespace {

}  // namespace

TEST_CASE("wav float32 round trip is exact") {
  testing::TempDir dir("wav");
  const Waveform w = testing::RandomWave(1234, 1);
  WriteWav(dir / "a.wav", w);
  const Waveform r = ReadWav(dir / "a.wav");
  CHECK(r.sample_rate == 16000);
  CHECK(r.samples == w.samples);
}

TEST_CASE("wav pcm16 round trip within one quantization step") {
  testing::TempDir dir("wav16");
  const Waveform w = testing::RandomWave(500, 2);
  WriteWav(dir / "a.wav", w, WavEncoding::kPcm16);
  const Waveform r = ReadWav(dir / "a.wav");
  REQUIRE(r.size() == w.size());
  for (size_t i = 0; i < w.size(); ++i) CHECK(std::abs(r.samples[i] - w.samples[i]) <= 1.0f / 32768);
}

TEST_CASE("wav errors") {
  testing::TempDir dir("wavbad");
  CHECK(testing::CodeOf([&] { ReadWav(dir / "missing.wav"); }) == ErrorCode::kIoFailure);
  {
    std::ofstream os(dir / "junk.wav", std::ios::binary);
    os << "not a riff file at all";
  }
  CHECK(testing::CodeOf([&] { ReadWav(dir / "junk.wav"); }) == ErrorCode::kMalformedFile);
}

TEST_CASE("resample changes length by the rate ratio") {
  const Waveform w = testing::RandomWave(16000, 3);
  const Waveform r = Resample(w, 10000);
  CHECK(r.sample_rate == 10000);
  CHECK(std::abs(static_cast<long>(r.size()) - 10000) <= 1);
  CHECK(Resample(w, 16000).samples == w.samples);
}

TEST_CASE("resample keeps an in-band tone") {
  Waveform w;
  for (int i = 0; i < 16000; ++i) w.samples.push_back(static_cast<float>(0.5 * std::sin(2 * std::numbers::pi * 440.0 * i / 16000)));
  const Waveform r = Resample(w, 10000);
  double err = 0.0;
  for (size_t i = 200; i + 200 < r.size(); ++i) {
    err = std::max(err, std::abs(r.samples[i] - 0.5 * std::sin(2 * std::numbers::pi * 440.0 * i / 10000)));
  }
  CHECK(err < 1e-2);
}

TEST_CASE("periodic hann window") {
  const auto w = HannWindow(400);
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[200] == doctest::Approx(1.0));
  CHECK(w[100] == doctest::Approx(0.5));
}

TEST_CASE("stft shape law for one second") {
  const ComplexSpectrogram s = Stft(testing::RandomWave(16000, 4));
  CHECK(s.num_frames == 100);
  CHECK(s.num_bins == 257);
  CHECK(EncodeSpectrogram(s).width() == 514);
  CHECK(s.params.WinSamples() == 400);
  CHECK(s.params.HopSamples() == 160);
}

TEST_CASE("stft istft round trip") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const Waveform w = testing::RandomWave(16000, 100 + seed);
    const Waveform r = Istft(Stft(w));
    REQUIRE(r.size() == w.size());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
      num += std::pow(r.samples[i] - w.samples[i], 2);
      den += std::pow(w.samples[i], 2);
    }
    CHECK(std::sqrt(num / den) < 1e-5);
  }
}

TEST_CASE("magnitude encoding oracle values") {
  CHECK(EncodeMagnitude(1.0) == doctest::Approx(100.0 / 120.0));
  CHECK(EncodeMagnitude(0.0) == 0.0);
  CHECK(EncodeMagnitude(1e6) == 1.0);
  for (double m : {1e-4, 1e-2, 0.5, 3.0, 10.0}) {
    CHECK(std::abs(DecodeMagnitude(EncodeMagnitude(m)) - m) / m < 1e-6);
  }
}

TEST_CASE("phase encoding") {
  CHECK(EncodePhase({0.0, 0.0}) == doctest::Approx(0.5));
  CHECK(EncodePhase({1.0, 0.0}) == doctest::Approx(0.5));
  CHECK(EncodePhase({-1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(EncodePhase({0.0, 1.0}) == doctest::Approx(0.75));
  CHECK(DecodePhase(0.75) == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("decode rejects values outside [0,1]") {
  NormSpectrogram s = EncodeSpectrogram(Stft(testing::RandomWave(1600, 5)));
  s.values[3] = 1.5;
  CHECK(testing::CodeOf([&] { DecodeSpectrogram(s); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("decode with noisy phase keeps the source phase") {
  const ComplexSpectrogram a = Stft(testing::RandomWave(3200, 6));
  const ComplexSpectrogram b = Stft(testing::RandomWave(3200, 7));
  const ComplexSpectrogram mixed = DecodeWithPhase(EncodeSpectrogram(a), b);
  for (int t = 3; t < 6; ++t) {
    for (int k = 10; k < 14; ++k) {
      CHECK(std::abs(mixed.at(t, k)) == doctest::Approx(std::abs(a.at(t, k))).epsilon(1e-6));
      CHECK(std::arg(mixed.at(t, k)) == doctest::Approx(std::arg(b.at(t, k))).epsilon(1e-6));
    }
  }
}

TEST_CASE("mel shape and chunking") {
  const MelSpectrogram mel = ComputeMel(testing::RandomWave(16000, 8));
  CHECK(mel.num_frames == 80);
  CHECK(mel.n_mels == 80);
  for (float v : mel.values) CHECK(v >= std::log(1e-5f) - 1e-6f);
  const MelChunk c = ChunkMel(mel, 0);
  CHECK(c.values.size() == 16u * 80u);
  // Frame 0 chunk starts before the signal and repeats the first frame.
  CHECK(c.at(0, 10) == mel.at(0, 10));
  CHECK(LipFrameCenter(10) == 32);
}

TEST_CASE("mel of silence sits on the floor") {
  Waveform w;
  w.samples.assign(8000, 0.0f);
  const MelSpectrogram mel = ComputeMel(w);
  for (float v : mel.values) CHECK(v == doctest::Approx(std::log(1e-5)));
}

TEST_CASE("mel filterbank has unit peaks inside the band") {
  const auto fb = MelFilterbank(MelParams{});
  REQUIRE(fb.size() == 80);
  for (const auto &f : fb) {
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, v);
    CHECK(peak > 0.3);
    CHECK(peak <= 1.0 + 1e-12);
  }
}
