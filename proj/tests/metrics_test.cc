// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pvse/common/error.h"
#include "pvse/data/corpus.h"
#include "pvse/data/manifest.h"
#include "pvse/data/mixer.h"
#include "pvse/metrics/evaluate.h"
#include "pvse/metrics/metrics.h"
#include "test_util.h"

using namespace pvse;
using namespace pvse::metrics;
using signal::Waveform;

namespace {

Waveform Speech(double seconds, uint64_t seed) {
  return data::SynthesizeSpeech(seconds, 16000, seed);
}

Waveform Scaled(const Waveform &w, float g) {
  Waveform out = w;
  for (auto &s : out.samples) s *= g;
  return out;
}

// One-pole lowpass, y[n] = (1 - a) x[n] + a y[n-1].
Waveform Lowpass(const Waveform &w, double a) {
  Waveform out = w;
  double y = 0.0;
  for (auto &s : out.samples) {
    y = (1.0 - a) * s + a * y;
    s = static_cast<float>(y);
  }
  return out;
}

}  // namespace

TEST_CASE("stoi identity and bounds") {
  const Waveform x = Speech(2.0, 1);
  CHECK(Stoi(x, x) == doctest::Approx(1.0).epsilon(1e-6));
  const Waveform n = data::SynthesizeNoise(data::NoiseKind::kWhite, 2.0, 16000, 2);
  const double s = Stoi(x, n);
  CHECK(s >= 0.0);
  CHECK(s < 0.3);
}

TEST_CASE("stoi errors") {
  const Waveform x = Speech(0.3, 1);
  CHECK(testing::CodeOf([&] { Stoi(x, x); }) == ErrorCode::kTooShort);
  Waveform silent;
  silent.samples.assign(16000, 0.0f);
  CHECK(testing::CodeOf([&] { Stoi(silent, silent); }) == ErrorCode::kSilentReference);
  CHECK(testing::CodeOf([&] { Stoi(Speech(1.0, 1), Speech(2.0, 1)); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("stoi decreases with snr") {
  const Waveform x = Speech(3.0, 3);
  const Waveform n = data::SynthesizeNoise(data::NoiseKind::kWhite, 3.0, 16000, 4);
  double prev = 2.0;
  for (double snr : {20.0, 10.0, 0.0}) {
    const auto mix = data::MixAtSnr(x, n, snr, 1);
    const double s = Stoi(mix.clean, mix.mixture);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("si-sdr oracles") {
  const Waveform x = Speech(1.0, 5);
  CHECK(SiSdr(x, Scaled(x, 0.5f)) == doctest::Approx(kSiSdrCap));
  // Orthogonal noise with a tenth of the clean energy gives 10 dB.
  Waveform n = testing::RandomWave(x.size(), 6);
  double xn = 0.0, xx = 0.0, nn = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    xn += double(x.samples[i]) * n.samples[i];
    xx += double(x.samples[i]) * x.samples[i];
  }
  std::vector<double> nd(x.size());
  for (size_t i = 0; i < x.size(); ++i) nd[i] = n.samples[i] - xn / xx * x.samples[i];
  for (double v : nd) nn += v * v;
  Waveform y = x;
  for (size_t i = 0; i < x.size(); ++i) y.samples[i] += static_cast<float>(nd[i] * std::sqrt(0.1 * xx / nn));
  CHECK(SiSdr(x, y) == doctest::Approx(10.0).epsilon(0.01));
  CHECK(SiSdr(x, testing::RandomWave(x.size(), 7)) < -20.0);
  Waveform silent;
  silent.samples.assign(x.size(), 0.0f);
  CHECK(testing::CodeOf([&] { SiSdr(silent, x); }) == ErrorCode::kSilentReference);
}

TEST_CASE("segmental snr oracles") {
  const Waveform x = Speech(1.0, 8);
  CHECK(SegSnr(x, x) == doctest::Approx(35.0));
  // Error equal to the clean signal in every frame: 0 dB.
  CHECK(SegSnr(x, Scaled(x, 0.0f)) == doctest::Approx(0.0));
  // Two 512-sample frames at hop 256 over a constant clean signal. The error
  // is sqrt(0.2) on the first 256 samples, 0 in the middle and sqrt(0.02) on
  // the last 256, so the frame SNRs are 10 and 20 dB.
  Waveform c, p;
  c.samples.assign(768, 1.0f);
  p = c;
  for (int i = 0; i < 256; ++i) p.samples[i] -= static_cast<float>(std::sqrt(0.2));
  for (int i = 512; i < 768; ++i) p.samples[i] -= static_cast<float>(std::sqrt(0.02));
  CHECK(SegSnr(c, p) == doctest::Approx(15.0).epsilon(1e-5));
  Waveform silent;
  silent.samples.assign(2000, 0.0f);
  CHECK(testing::CodeOf([&] { SegSnr(silent, silent); }) == ErrorCode::kNoValidFrames);
}

TEST_CASE("llr oracles") {
  const Waveform x = Speech(1.0, 9);
  CHECK(Llr(x, x) == doctest::Approx(0.0).epsilon(1e-6));
  // AR(2) resonance against white noise.
  Waveform ar;
  Rng rng(10);
  double y1 = 0.0, y2 = 0.0;
  for (int i = 0; i < 16000; ++i) {
    const double y = 1.6 * y1 - 0.9 * y2 + 0.05 * rng.Normal();
    ar.samples.push_back(static_cast<float>(y));
    y2 = y1;
    y1 = y;
  }
  const Waveform white = testing::RandomWave(16000, 11);
  CHECK(Llr(ar, white) > 0.5);
  CHECK(Llr(x, white) >= 0.0);
  CHECK(testing::CodeOf([&] { Llr(testing::RandomWave(600, 1), testing::RandomWave(600, 2)); }) ==
        ErrorCode::kTooShort);
}

TEST_CASE("wss oracles") {
  const Waveform x = Speech(1.0, 12);
  CHECK(Wss(x, x) == doctest::Approx(0.0));
  for (float g : {0.25f, 2.0f}) CHECK(std::abs(Wss(x, Scaled(x, g))) < 1e-9);
  const Waveform y = Speech(2.0, 7);  // syllable edges put bands near silence
  CHECK(std::abs(Wss(y, Scaled(y, 0.25f))) < 1e-9);
  const double mild = Wss(x, Lowpass(x, 0.3));
  const double strong = Wss(x, Lowpass(x, 0.95));
  CHECK(mild >= 0.0);
  CHECK(strong > mild);
}

TEST_CASE("spectral l1 is zero at identity") {
  const Waveform x = Speech(1.0, 13);
  CHECK(SpectralL1(x, x) == 0.0);
  CHECK(SpectralL1(x, testing::RandomWave(x.size(), 1)) > 0.0);
}

TEST_CASE("dataset evaluation of the noisy arm") {
  testing::TempDir dir("eval");
  data::CorpusConfig cfg;
  cfg.n_utterances = 2;
  cfg.utt_seconds = 1.0;
  data::GenerateSyntheticCorpus(cfg, dir.str());
  const auto manifest = data::SynthesizeDataset(dir / "clean", dir / "noise", {0, 10},
                                                {1, 0, 0}, 2, dir / "m.jsonl");
  EvalOptions opt;
  const auto a = EvaluateDataset(manifest, dir / "m.jsonl", opt, dir / "a.json");
  EvaluateDataset(manifest, dir / "m.jsonl", opt, dir / "b.json");
  CHECK(testing::ReadBytes(dir / "a.json") == testing::ReadBytes(dir / "b.json"));
  CHECK(a["version"] == kReportVersion);
  CHECK(a["per_utterance"].size() == 4u);
  CHECK(a["aggregates"].size() == 2u);
  CHECK(a["aggregates"]["0"]["noisy"]["stoi"]["count"] == 2);
  CHECK(a["aggregates"]["10"]["noisy"]["si_sdr"]["mean"].get<double>() >
        a["aggregates"]["0"]["noisy"]["si_sdr"]["mean"].get<double>());
  for (const auto &row : a["per_utterance"]) {
    const double s = row["noisy"]["stoi"];
    CHECK((s >= 0.0 && s <= 1.0));
  }
  std::vector<std::string> keys;
  for (const auto &[k, v] : a.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"version", "manifest_path", "arms", "per_utterance",
                                         "aggregates"});
  opt.arms = {Arm::kNoisy, Arm::kOurs};
  CHECK(testing::CodeOf([&] { EvaluateDataset(manifest, "", opt, ""); }) == ErrorCode::kNoCheckpoint);
  CHECK(testing::CodeOf([&] { EvaluateDataset({}, "", EvalOptions{}, ""); }) ==
        ErrorCode::kEmptyManifest);
}
