// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/enhancer/grad_suite.h"

#include <cmath>

#include "pvse/common/random.h"
#include "pvse/enhancer/enhancer.h"
#include "pvse/lipgen/student.h"
#include "pvse/nn/layers.h"
#include "pvse/nn/ops.h"

namespace pvse::enhancer {

using nn::LayerKind;
using nn::LayerSpec;
using nn::Tensor;
using TensorD = Tensor<double>;

namespace {

// Values in +-[0.1, 1] so ReLU inputs stay clear of the kink.
TensorD RandomTensor(const nn::Dims &dims, Rng &rng) {
  std::vector<double> v(nn::NumElements(dims));
  for (auto &x : v) {
    const double mag = rng.Uniform(0.1, 1.0);
    x = rng.Uniform() < 0.5 ? -mag : mag;
  }
  return TensorD::FromData(dims, std::move(v));
}

TensorD UniformTensor(const nn::Dims &dims, Rng &rng, double lo, double hi) {
  std::vector<double> v(nn::NumElements(dims));
  for (auto &x : v) x = rng.Uniform(lo, hi);
  return TensorD::FromData(dims, std::move(v));
}

// Randomly weighted sum, so every output coordinate matters.
std::function<TensorD()> Weighted(std::function<TensorD()> f, const nn::Dims &out_dims,
                                  Rng &rng) {
  const TensorD w = RandomTensor(out_dims, rng);
  return [f, w]() { return nn::WeightedSum(f(), w); };
}

GradSuiteEntry CheckLayer(const LayerSpec &spec, const std::vector<nn::Dims> &inputs,
                          Rng &rng) {
  nn::Layer<double> layer(spec);
  layer.Init(rng, nn::InitOptions{.zero_residual_branch = false});
  std::vector<TensorD> wrt;
  for (const auto &d : inputs) wrt.push_back(RandomTensor(d, rng));
  for (auto &p : layer.params()) wrt.push_back(p);
  const TensorD a = wrt[0];
  const TensorD b = inputs.size() > 1 ? wrt[1] : TensorD();
  auto forward = [layer, a, b]() {
    return b.defined() ? layer.Forward(a, b) : layer.Forward(a);
  };
  nn::Dims out_dims;
  {
    nn::NoGradGuard guard;
    out_dims = forward().dims();
  }
  return {nn::LayerKindName(spec.kind),
          nn::FiniteDiffCheck(Weighted(forward, out_dims, rng), wrt)};
}

GradSuiteEntry CheckOp(const std::string &name, const std::function<TensorD(const TensorD &)> &op,
                       const nn::Dims &in_dims, Rng &rng) {
  TensorD x = RandomTensor(in_dims, rng);
  auto forward = [op, x]() { return op(x); };
  nn::Dims out_dims;
  {
    nn::NoGradGuard guard;
    out_dims = forward().dims();
  }
  return {name, nn::FiniteDiffCheck(Weighted(forward, out_dims, rng), {x})};
}

GradSuiteEntry CheckL1(Rng &rng) {
  TensorD pred = RandomTensor({2, 3, 4}, rng);
  const TensorD target = RandomTensor({2, 3, 4}, rng);
  return {"l1_loss", nn::FiniteDiffCheck([pred, target]() { return nn::L1Loss(pred, target); },
                                         {pred})};
}

// The student loss sums 2048 outputs while each prior pixel feeds one of them,
// so a wider step keeps round-off in the difference below the tolerance.
constexpr double kWideOutputStep = 1e-4;

GradSuiteEntry CheckStudent(Rng &rng) {
  lipgen::StudentNet<double> net(lipgen::StudentConfig{.base_channels = 1, .embed_dim = 2});
  net.Init(rng.NextU64());
  // Init zeroes the head; refill it, pick a random prior, and shift biases
  // off zero so dead ReLUs do not hide gradient paths.
  for (auto &v : net.layers().back().params()[0].data()) v = rng.Uniform(-0.2, 0.2);
  std::vector<float> frame(lipgen::kFramePixels);
  for (auto &v : frame) v = static_cast<float>(rng.Uniform(0.1, 0.9));
  net.SetPrior(frame);
  for (auto &p : net.Parameters()) {
    if (p.rank() == 1) {
      for (auto &v : p.data()) v = rng.Uniform(0.05, 0.2);
    }
  }
  const TensorD mel = UniformTensor({1, 1, 16, 80}, rng, -2.0, 2.0);
  auto forward = [net, mel]() { return net.Forward(mel); };
  return {"student_tiny",
          nn::FiniteDiffCheck(Weighted(forward, {1, 1, 32, 64}, rng), net.Parameters(),
                              kWideOutputStep)};
}

GradSuiteEntry CheckEnhancer(bool use_visual, Rng &rng) {
  EnhancerConfig c;
  c.speech_blocks = 2;
  c.visual_layers = 2;
  c.visual_stages = 2;
  c.decoder_layers = 2;
  c.speech_ch = 8;
  c.visual_embed = 8;
  c.kernel = 3;
  c.spec_channels = 8;
  c.frames = 4;
  c.visual_frames = 1;
  c.upsample_factor = 4;
  c.frame_h = 4;
  c.frame_w = 8;
  c.use_visual = use_visual;
  EnhancerNet<double> net(c);
  net.Init(rng.NextU64(), /*zero_head=*/false);
  for (const auto *layer : net.AllLayers()) {
    auto *mut = const_cast<nn::Layer<double> *>(layer);
    for (auto &p : mut->params()) {
      for (auto &v : p.data()) {
        if (p.rank() == 1) v = rng.Uniform(0.05, 0.2);
        else if (v == 0.0) v = rng.Uniform(-0.2, 0.2);
      }
    }
  }
  const int batch = 2;
  TensorD noisy = UniformTensor({batch, c.spec_channels, c.frames}, rng, 0.0, 1.0);
  TensorD frames =
      UniformTensor({batch * c.visual_frames, 1, c.frame_h, c.frame_w}, rng, 0.0, 1.0);
  const TensorD clean = UniformTensor({batch, c.spec_channels, c.frames}, rng, 0.0, 1.0);
  auto loss = [net, noisy, frames, clean]() {
    return nn::L1Loss(net.Forward(noisy, frames), clean);
  };
  std::vector<TensorD> wrt = net.Parameters();
  wrt.push_back(noisy);
  if (use_visual) wrt.push_back(frames);
  return {use_visual ? "enhancer_tiny" : "enhancer_tiny_ao", nn::FiniteDiffCheck(loss, wrt)};
}

}  // namespace

std::vector<GradSuiteEntry> RunGradientSuite(uint64_t seed) {
  Rng rng(MixSeed(seed, 77));
  std::vector<GradSuiteEntry> out;
  out.push_back(CheckLayer(LayerSpec::Conv1d(3, 4, 3), {{2, 3, 7}}, rng));
  out.push_back(CheckLayer(LayerSpec::Conv2d(2, 3, 3, 3, 2, 1, 1, 1), {{2, 2, 5, 6}}, rng));
  out.push_back(CheckLayer(LayerSpec::TConv2d(3, 2, 4, 4, 2, 2, 1, 1), {{2, 3, 3, 4}}, rng));
  out.push_back(CheckLayer(LayerSpec::Relu(), {{2, 3, 5}}, rng));
  out.push_back(CheckLayer(LayerSpec::Sigmoid(), {{2, 3, 5}}, rng));
  out.push_back(CheckLayer(LayerSpec::NearestUpsampleT(4), {{2, 3, 4}}, rng));
  out.push_back(CheckLayer(LayerSpec::ConcatCh(), {{2, 3, 4}, {2, 2, 4}}, rng));
  out.push_back(CheckLayer(LayerSpec::ResidualBlock1d(3, 5), {{2, 3, 8}}, rng));
  out.push_back(CheckLayer(LayerSpec::ResidualBlock2d(2, 3), {{2, 2, 4, 5}}, rng));
  out.push_back(CheckOp("global_avg_pool", [](const TensorD &x) { return nn::GlobalAvgPool2d(x); },
                        {2, 3, 4, 5}, rng));
  out.push_back(CheckOp("swap_last_axes", [](const TensorD &x) { return nn::SwapLastAxes(x); },
                        {2, 3, 4}, rng));
  out.push_back(CheckOp("reshape", [](const TensorD &x) { return nn::Reshape(x, {6, 4}); },
                        {2, 3, 4}, rng));
  out.push_back(CheckOp("add", [](const TensorD &x) { return nn::Add(x, nn::Scale(x, 2.0)); },
                        {2, 3, 4}, rng));
  {
    const TensorD bias = RandomTensor({1, 3, 4}, rng);
    out.push_back(CheckOp("add_batch_bias",
                          [bias](const TensorD &x) { return nn::AddBatchBias(x, bias); },
                          {2, 3, 4}, rng));
    const TensorD base = RandomTensor({2, 3, 4}, rng);
    out.push_back(CheckOp("add_batch_bias_grad_bias",
                          [base](const TensorD &b) { return nn::AddBatchBias(base, b); },
                          {1, 3, 4}, rng));
  }
  out.push_back(CheckOp("mean", [](const TensorD &x) { return nn::Mean(x); }, {2, 3, 4}, rng));
  out.push_back(CheckL1(rng));
  out.push_back(CheckStudent(rng));
  out.push_back(CheckEnhancer(true, rng));
  out.push_back(CheckEnhancer(false, rng));
  return out;
}

}  // namespace pvse::enhancer
