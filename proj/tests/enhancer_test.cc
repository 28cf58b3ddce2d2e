// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "pvse/common/error.h"
#include "pvse/data/corpus.h"
#include "pvse/data/manifest.h"
#include "pvse/enhancer/enhancer.h"
#include "pvse/nn/ops.h"
#include "test_util.h"

using namespace pvse;
using namespace pvse::enhancer;
using nn::Dims;
using nn::Tensor;

namespace {

EnhancerConfig Small(bool use_visual = true) {
  EnhancerConfig c;
  c.speech_blocks = 2;
  c.visual_layers = 4;
  c.decoder_layers = 2;
  c.speech_ch = 16;
  c.visual_embed = 16;
  c.visual_stages = 2;
  c.use_visual = use_visual;
  return c;
}

Tensor<float> RandomTensor(const Dims &dims, uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  std::vector<float> v(nn::NumElements(dims));
  for (auto &x : v) x = static_cast<float>(rng.Uniform(lo, hi));
  return Tensor<float>::FromData(dims, std::move(v));
}

// Randomizes every parameter so equivariance checks see non-trivial weights.
template <typename Net>
void Perturb(Net &net, uint64_t seed) {
  Rng rng(seed);
  for (auto &p : net.Parameters()) {
    for (auto &v : p.data()) v = static_cast<float>(rng.Uniform(-0.1, 0.1));
  }
}

}  // namespace

TEST_CASE("default config obeys the alignment law") {
  EnhancerConfig c;
  CHECK(c.visual_frames * c.upsample_factor == c.frames);
  c.upsample_factor = 3;
  CHECK(testing::CodeOf([&] { c.Validate(); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("full-size module shapes") {
  EnhancerNet<float> net;
  net.Init(1);
  const auto spec = RandomTensor({1, 514, 100}, 2);
  const auto frames = RandomTensor({25, 1, 32, 64}, 3);
  nn::NoGradGuard guard;
  const auto audio = net.SpeechEncode(spec);
  CHECK(audio.dims() == Dims{1, 256, 100});
  const auto visual = net.VisualEncode(frames);
  CHECK(visual.dims() == Dims{1, 128, 25});
  const auto fused = net.Fuse(audio, visual);
  CHECK(fused.dims() == Dims{1, 384, 100});
  const auto mask = net.DecodeMask(fused);
  CHECK(mask.dims() == Dims{1, 514, 100});
  // Zero-initialized head gives a zero mask, so the output is sigmoid(input).
  for (float v : mask.values()) CHECK(v == 0.0f);
  const auto out = net.Forward(spec, frames);
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out.data()[i] == doctest::Approx(1.0 / (1.0 + std::exp(-spec.data()[i]))));
  }
}

TEST_CASE("speech encoder is temporally equivariant away from the edges") {
  EnhancerNet<float> net(Small());
  net.Init(4);
  Perturb(net, 5);
  const auto base = RandomTensor({1, 514, 110}, 6);
  // b is a shifted by 10 frames.
  std::vector<float> a(514 * 100), b(514 * 100);
  for (int c = 0; c < 514; ++c) {
    for (int t = 0; t < 100; ++t) {
      a[c * 100 + t] = base.data()[c * 110 + t];
      b[c * 100 + t] = base.data()[c * 110 + t + 10];
    }
  }
  nn::NoGradGuard guard;
  const auto fa = net.SpeechEncode(Tensor<float>::FromData({1, 514, 100}, a));
  const auto fb = net.SpeechEncode(Tensor<float>::FromData({1, 514, 100}, b));
  for (int c = 0; c < 16; ++c) {
    for (int t = 20; t < 80; ++t) {
      CHECK(fb.data()[c * 100 + t] == doctest::Approx(fa.data()[c * 100 + t + 10]).epsilon(1e-4));
    }
  }
}

TEST_CASE("zero input gives a constant interior") {
  EnhancerNet<float> net(Small());
  net.Init(7);
  Perturb(net, 8);
  nn::NoGradGuard guard;
  const auto f = net.SpeechEncode(Tensor<float>::Zeros({1, 514, 100}));
  for (int c = 0; c < 16; ++c) {
    for (int t = 20; t < 80; ++t) {
      CHECK(f.data()[c * 100 + t] == doctest::Approx(f.data()[c * 100 + 50]).epsilon(1e-5));
    }
  }
}

TEST_CASE("visual encoder treats frames independently") {
  EnhancerNet<float> net(Small());
  net.Init(9);
  Perturb(net, 10);
  const auto frames = RandomTensor({25, 1, 32, 64}, 11);
  // Reverse the frame order.
  std::vector<float> rev(frames.size());
  const size_t px = 32 * 64;
  for (size_t f = 0; f < 25; ++f) {
    std::copy_n(frames.data().begin() + f * px, px, rev.begin() + (24 - f) * px);
  }
  nn::NoGradGuard guard;
  const auto e = net.VisualEncode(frames);
  const auto er = net.VisualEncode(Tensor<float>::FromData({25, 1, 32, 64}, rev));
  for (int c = 0; c < 16; ++c) {
    for (int f = 0; f < 25; ++f) {
      CHECK(er.data()[c * 25 + (24 - f)] == doctest::Approx(e.data()[c * 25 + f]).epsilon(1e-5));
    }
  }
  // Identical frames give identical embeddings.
  std::vector<float> same(frames.size());
  for (size_t f = 0; f < 25; ++f) std::copy_n(frames.data().begin(), px, same.begin() + f * px);
  const auto es = net.VisualEncode(Tensor<float>::FromData({25, 1, 32, 64}, same));
  for (int c = 0; c < 16; ++c) {
    for (int f = 1; f < 25; ++f) CHECK(es.data()[c * 25 + f] == es.data()[c * 25]);
  }
}

TEST_CASE("fuse repeats visual rows and zero-fills in audio-only mode") {
  EnhancerNet<float> net(Small());
  const auto audio = RandomTensor({1, 16, 100}, 12);
  const auto visual = RandomTensor({1, 16, 25}, 13);
  const auto fused = net.Fuse(audio, visual);
  CHECK(fused.dims() == Dims{1, 32, 100});
  for (int c = 0; c < 16; ++c) {
    for (int t = 0; t < 100; ++t) {
      CHECK(fused.data()[(16 + c) * 100 + t] == visual.data()[c * 25 + t / 4]);
      CHECK(fused.data()[c * 100 + t] == audio.data()[c * 100 + t]);
    }
  }
  const auto ao = net.Fuse(audio, Tensor<float>());
  CHECK(ao.dims() == Dims{1, 32, 100});
  for (int i = 16 * 100; i < 32 * 100; ++i) CHECK(ao.data()[i] == 0.0f);
  CHECK(testing::CodeOf([&] { net.Fuse(audio, RandomTensor({1, 16, 24}, 1)); }) ==
        ErrorCode::kShapeMismatch);
}

TEST_CASE("apply mask oracles") {
  const auto noisy = RandomTensor({1, 514, 100}, 14);
  const auto out = ApplyMask(noisy, nn::Scale(noisy, -1.0f));
  for (float v : out.values()) CHECK(v == doctest::Approx(0.5f));
  const auto low = ApplyMask(noisy, Tensor<float>::Full({1, 514, 100}, -20.0f));
  for (float v : low.values()) CHECK((v > 0.0f && v < 1e-8f));
  CHECK(testing::CodeOf([&] { ApplyMask(noisy, Tensor<float>::Zeros({1, 514, 99})); }) ==
        ErrorCode::kShapeMismatch);
}

TEST_CASE("mask logits are finite") {
  EnhancerNet<float> net(Small());
  net.Init(15, /*zero_head=*/false);
  nn::NoGradGuard guard;
  const auto mask = net.DecodeMask(RandomTensor({2, 32, 100}, 16));
  for (float v : mask.values()) CHECK(std::isfinite(v));
}

TEST_CASE("enhance utterance keeps length and needs a student for the visual path") {
  EnhancerModel ao{EnhancerNet<float>(Small(false))};
  ao.net.Init(17);
  const auto wave = testing::RandomWave(40000, 18);  // 2.5 s, three chunks
  const auto out = EnhanceUtterance(wave, nullptr, ao);
  CHECK(out.size() == wave.size());
  const auto short_out = EnhanceUtterance(testing::RandomWave(1600, 19), nullptr, ao);
  CHECK(short_out.size() == 1600u);

  EnhancerModel full{EnhancerNet<float>(Small(true))};
  full.net.Init(20);
  CHECK(testing::CodeOf([&] { EnhanceUtterance(wave, nullptr, full); }) == ErrorCode::kNoCheckpoint);
  lipgen::StudentModel student{lipgen::StudentNet<float>({.base_channels = 2, .embed_dim = 8})};
  student.net.Init(21);
  CHECK(EnhanceUtterance(wave, &student, full).size() == wave.size());
}

TEST_CASE("chunks are independent of processing order") {
  EnhancerModel ao{EnhancerNet<float>(Small(false))};
  ao.net.Init(22);
  Perturb(ao.net, 23);
  const auto wave = testing::RandomWave(48000, 24);
  const auto whole = EnhanceUtterance(wave, nullptr, ao);
  signal::Waveform second;
  second.samples.assign(wave.samples.begin() + 16000, wave.samples.begin() + 32000);
  const auto alone = EnhanceUtterance(second, nullptr, ao);
  for (size_t i = 0; i < alone.size(); ++i) CHECK(alone.samples[i] == whole.samples[16000 + i]);
}

TEST_CASE("checkpoint round trip and kind check") {
  testing::TempDir dir("enh");
  EnhancerModel m{EnhancerNet<float>(Small())};
  m.net.Init(25);
  Perturb(m.net, 26);
  m.Save(dir.str(), 3);
  const EnhancerModel r = LoadEnhancer(dir.str());
  CHECK(r.net.config().ToJson() == m.net.config().ToJson());
  const auto a = m.net.NamedParams(), b = r.net.NamedParams();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].second.values() == b[i].second.values());

  lipgen::StudentModel s{lipgen::StudentNet<float>({.base_channels = 2, .embed_dim = 8})};
  s.Save(dir / "student", 1);
  CHECK(testing::CodeOf([&] { LoadEnhancer(dir / "student"); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("audio-only training without a student is deterministic") {
  testing::TempDir dir("train_enh");
  data::CorpusConfig cfg;
  cfg.n_utterances = 2;
  cfg.utt_seconds = 1.0;
  cfg.noise_kinds = {data::NoiseKind::kWhite};
  cfg.noise_files_per_kind = 1;
  data::GenerateSyntheticCorpus(cfg, dir.str());
  const auto manifest = data::SynthesizeDataset(dir / "clean", dir / "noise", {0}, {1, 0, 0},
                                                1, dir / "m.jsonl");
  EnhancerTrainConfig tc;
  tc.net = Small(false);
  tc.steps = 30;
  tc.batch = 2;
  tc.lr = 1e-3;
  tc.log_every = 10;
  nn::TrainLog la, lb;
  const EnhancerModel a = TrainEnhancer(manifest, nullptr, tc, &la);
  const EnhancerModel b = TrainEnhancer(manifest, nullptr, tc, &lb);
  CHECK(la.records.size() == 3u);
  CHECK(la.records.back().loss < la.records.front().loss);
  const auto pa = a.net.NamedParams(), pb = b.net.NamedParams();
  for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].second.values() == pb[i].second.values());

  tc.net.use_visual = true;
  CHECK(testing::CodeOf([&] { TrainEnhancer(manifest, nullptr, tc, nullptr); }) ==
        ErrorCode::kNoCheckpoint);
  CHECK(testing::CodeOf([&] { TrainEnhancer({}, nullptr, tc, nullptr); }) == ErrorCode::kEmptyManifest);
}
