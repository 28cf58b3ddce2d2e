// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/nn/layers.h"

#include <cmath>
#include <map>

#include "pvse/common/error.h"

namespace pvse::nn {

std::string LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv1d: return "conv1d";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kTConv2d: return "tconv2d";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kSigmoid: return "sigmoid";
    case LayerKind::kNearestUpsampleT: return "nearest_upsample_t";
    case LayerKind::kConcatCh: return "concat_ch";
    case LayerKind::kResidualBlock1d: return "residual_block_1d";
    case LayerKind::kResidualBlock2d: return "residual_block_2d";
  }
  return "unknown";
}

void LayerSpec::Validate() const {
  switch (kind) {
    case LayerKind::kConv1d:
    case LayerKind::kConv2d:
    case LayerKind::kTConv2d:
    case LayerKind::kResidualBlock1d:
    case LayerKind::kResidualBlock2d:
      PVSE_CHECK(in_ch > 0 && out_ch > 0 && kernel_h > 0 && kernel_w > 0 &&
                     stride_h > 0 && stride_w > 0 && pad_h >= 0 && pad_w >= 0,
                 kInvalidArgument, LayerKindName(kind), ": bad geometry");
      break;
    case LayerKind::kNearestUpsampleT:
      PVSE_CHECK(factor >= 1, kInvalidArgument, "upsample factor must be >= 1");
      break;
    default:
      break;
  }
  if (kind == LayerKind::kConv1d || kind == LayerKind::kResidualBlock1d) {
    PVSE_CHECK(kernel_w % 2 == 1, kInvalidArgument, "1d kernels must be odd");
  }
  if (kind == LayerKind::kResidualBlock1d || kind == LayerKind::kResidualBlock2d) {
    PVSE_CHECK(in_ch == out_ch && stride_h == 1 && stride_w == 1, kInvalidArgument,
               "residual blocks need in_ch == out_ch and stride 1");
  }
}

LayerSpec LayerSpec::Conv1d(int in_ch, int out_ch, int kernel) {
  LayerSpec s;
  s.kind = LayerKind::kConv1d;
  s.in_ch = in_ch;
  s.out_ch = out_ch;
  s.kernel_w = kernel;
  s.pad_w = kernel / 2;
  return s;
}

LayerSpec LayerSpec::Conv2d(int in_ch, int out_ch, int kernel_h, int kernel_w,
                            int stride_h, int stride_w, int pad_h, int pad_w) {
  return {LayerKind::kConv2d, in_ch, out_ch, kernel_h, kernel_w,
          stride_h, stride_w, pad_h, pad_w, 1};
}

LayerSpec LayerSpec::TConv2d(int in_ch, int out_ch, int kernel_h, int kernel_w,
                             int stride_h, int stride_w, int pad_h, int pad_w) {
  return {LayerKind::kTConv2d, in_ch, out_ch, kernel_h, kernel_w,
          stride_h, stride_w, pad_h, pad_w, 1};
}

LayerSpec LayerSpec::Relu() { return {LayerKind::kRelu}; }
LayerSpec LayerSpec::Sigmoid() { return {LayerKind::kSigmoid}; }

LayerSpec LayerSpec::NearestUpsampleT(int factor) {
  LayerSpec s;
  s.kind = LayerKind::kNearestUpsampleT;
  s.factor = factor;
  return s;
}

LayerSpec LayerSpec::ConcatCh() { return {LayerKind::kConcatCh}; }

LayerSpec LayerSpec::ResidualBlock1d(int channels, int kernel) {
  LayerSpec s = Conv1d(channels, channels, kernel);
  s.kind = LayerKind::kResidualBlock1d;
  return s;
}

LayerSpec LayerSpec::ResidualBlock2d(int channels, int kernel) {
  return {LayerKind::kResidualBlock2d, channels, channels, kernel, kernel,
          1, 1, kernel / 2, kernel / 2, 1};
}

template <typename T>
Layer<T>::Layer(const LayerSpec &spec) : spec_(spec) {
  spec_.Validate();
  const int kh = spec_.kernel_h, kw = spec_.kernel_w;
  switch (spec_.kind) {
    case LayerKind::kConv1d:
      params_ = {Tensor<T>::Zeros({spec_.out_ch, spec_.in_ch, kw}, true),
                 Tensor<T>::Zeros({spec_.out_ch}, true)};
      break;
    case LayerKind::kConv2d:
      params_ = {Tensor<T>::Zeros({spec_.out_ch, spec_.in_ch, kh, kw}, true),
                 Tensor<T>::Zeros({spec_.out_ch}, true)};
      break;
    case LayerKind::kTConv2d:
      params_ = {Tensor<T>::Zeros({spec_.in_ch, spec_.out_ch, kh, kw}, true),
                 Tensor<T>::Zeros({spec_.out_ch}, true)};
      break;
    case LayerKind::kResidualBlock1d:
      for (int i = 0; i < 2; ++i) {
        params_.push_back(Tensor<T>::Zeros({spec_.out_ch, spec_.in_ch, kw}, true));
        params_.push_back(Tensor<T>::Zeros({spec_.out_ch}, true));
      }
      break;
    case LayerKind::kResidualBlock2d:
      for (int i = 0; i < 2; ++i) {
        params_.push_back(Tensor<T>::Zeros({spec_.out_ch, spec_.in_ch, kh, kw}, true));
        params_.push_back(Tensor<T>::Zeros({spec_.out_ch}, true));
      }
      break;
    default:
      break;
  }
}

template <typename T>
void Layer<T>::Init(Rng &rng, const InitOptions &options) {
  auto he_uniform = [&rng](Tensor<T> &w, double fan_in) {
    const double bound = std::sqrt(6.0 / std::max(1.0, fan_in));
    for (T &v : w.data()) v = static_cast<T>(rng.Uniform(-bound, bound));
  };
  const double taps = static_cast<double>(spec_.kernel_h) * spec_.kernel_w;
  switch (spec_.kind) {
    case LayerKind::kConv1d:
    case LayerKind::kConv2d:
      he_uniform(params_[0], spec_.in_ch * taps);
      break;
    case LayerKind::kTConv2d:
      // Each output pixel receives about in_ch * taps / stride^2 products.
      he_uniform(params_[0],
                 spec_.in_ch * taps / (static_cast<double>(spec_.stride_h) * spec_.stride_w));
      break;
    case LayerKind::kResidualBlock1d:
    case LayerKind::kResidualBlock2d:
      he_uniform(params_[0], spec_.in_ch * taps);
      if (options.zero_residual_branch) {
        for (T &v : params_[2].data()) v = T(0);
      } else {
        he_uniform(params_[2], spec_.in_ch * taps);
      }
      break;
    default:
      return;
  }
  for (size_t i = 1; i < params_.size(); i += 2) {
    for (T &v : params_[i].data()) v = T(0);
  }
}

template <typename T>
Tensor<T> Layer<T>::Forward(const Tensor<T> &x) const {
  const Conv2dGeometry geo{spec_.stride_h, spec_.stride_w, spec_.pad_h, spec_.pad_w};
  switch (spec_.kind) {
    case LayerKind::kConv1d:
      return Conv1d(x, params_[0], params_[1]);
    case LayerKind::kConv2d:
      return Conv2d(x, params_[0], params_[1], geo);
    case LayerKind::kTConv2d:
      return ConvTranspose2d(x, params_[0], params_[1], geo);
    case LayerKind::kRelu:
      return Relu(x);
    case LayerKind::kSigmoid:
      return Sigmoid(x);
    case LayerKind::kNearestUpsampleT:
      return UpsampleNearestT(x, spec_.factor);
    case LayerKind::kResidualBlock1d: {
      const Tensor<T> h = Relu(Conv1d(x, params_[0], params_[1]));
      return Relu(Add(x, Conv1d(h, params_[2], params_[3])));
    }
    case LayerKind::kResidualBlock2d: {
      const Tensor<T> h = Relu(Conv2d(x, params_[0], params_[1], geo));
      return Relu(Add(x, Conv2d(h, params_[2], params_[3], geo)));
    }
    case LayerKind::kConcatCh:
      break;
  }
  PVSE_THROW(kInvalidArgument, LayerKindName(spec_.kind), " needs two inputs");
}

template <typename T>
Tensor<T> Layer<T>::Forward(const Tensor<T> &a, const Tensor<T> &b) const {
  PVSE_CHECK(spec_.kind == LayerKind::kConcatCh, kInvalidArgument,
             LayerKindName(spec_.kind), " takes one input");
  return ConcatChannels(a, b);
}

template <typename T>
void Layer<T>::CollectParams(const std::string &prefix, ParamList<T> *out) const {
  static const char *kConvNames[] = {"weight", "bias"};
  static const char *kResidualNames[] = {"weight1", "bias1", "weight2", "bias2"};
  const bool residual = spec_.kind == LayerKind::kResidualBlock1d ||
                        spec_.kind == LayerKind::kResidualBlock2d;
  for (size_t i = 0; i < params_.size(); ++i) {
    out->emplace_back(prefix + "." + (residual ? kResidualNames[i] : kConvNames[i]),
                      params_[i]);
  }
}

template class Layer<float>;
template class Layer<double>;

template <typename To, typename From>
void CopyParams(const ParamList<From> &src, ParamList<To> *dst) {
  std::map<std::string, const Tensor<From> *> by_name;
  for (const auto &[name, t] : src) by_name[name] = &t;
  for (auto &[name, t] : *dst) {
    auto it = by_name.find(name);
    PVSE_CHECK(it != by_name.end(), kShapeMismatch, "missing parameter ", name);
    PVSE_CHECK(it->second->size() == t.size(), kShapeMismatch, "parameter ", name,
               " has ", it->second->size(), " values, expected ", t.size());
    for (size_t i = 0; i < t.size(); ++i) t.data()[i] = static_cast<To>(it->second->data()[i]);
  }
}

template void CopyParams<float, float>(const ParamList<float> &, ParamList<float> *);
template void CopyParams<double, float>(const ParamList<float> &, ParamList<double> *);
template void CopyParams<float, double>(const ParamList<double> &, ParamList<float> *);
template void CopyParams<double, double>(const ParamList<double> &, ParamList<double> *);

}  // namespace pvse::nn
