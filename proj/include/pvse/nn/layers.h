// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_NN_LAYERS_H_
#define PVSE_NN_LAYERS_H_

#include <string>
#include <utility>
#include <vector>

#include "pvse/common/random.h"
#include "pvse/nn/ops.h"
#include "pvse/nn/tensor.h"

namespace pvse::nn {

enum class LayerKind {
  kConv1d,
  kConv2d,
  kTConv2d,
  kRelu,
  kSigmoid,
  kNearestUpsampleT,
  kConcatCh,
  kResidualBlock1d,
  kResidualBlock2d,
};

std::string LayerKindName(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  int in_ch = 0;
  int out_ch = 0;
  int kernel_h = 1, kernel_w = 1;  // conv1d uses kernel_w
  int stride_h = 1, stride_w = 1;
  int pad_h = 0, pad_w = 0;
  int factor = 1;  // nearest_upsample_t

  // Throws InvalidArgument; residual blocks need in_ch == out_ch and stride 1.
  void Validate() const;

  static LayerSpec Conv1d(int in_ch, int out_ch, int kernel);
  static LayerSpec Conv2d(int in_ch, int out_ch, int kernel_h, int kernel_w,
                          int stride_h, int stride_w, int pad_h, int pad_w);
  static LayerSpec TConv2d(int in_ch, int out_ch, int kernel_h, int kernel_w,
                           int stride_h, int stride_w, int pad_h, int pad_w);
  static LayerSpec Relu();
  static LayerSpec Sigmoid();
  static LayerSpec NearestUpsampleT(int factor);
  static LayerSpec ConcatCh();
  // conv -> ReLU -> conv, identity skip, ReLU after the addition.
  static LayerSpec ResidualBlock1d(int channels, int kernel);
  static LayerSpec ResidualBlock2d(int channels, int kernel);
};

template <typename T>
using ParamList = std::vector<std::pair<std::string, Tensor<T>>>;

struct InitOptions {
  // Zero the second convolution of residual blocks so every block starts as
  // the identity on non-negative inputs.
  bool zero_residual_branch = true;
};

// A layer owns its parameters. Convolutions hold {weight, bias}; residual
// blocks hold {weight1, bias1, weight2, bias2}.
template <typename T>
class Layer {
 public:
  Layer() = default;
  explicit Layer(const LayerSpec &spec);

  const LayerSpec &spec() const { return spec_; }

  // He-uniform weights, zero biases.
  void Init(Rng &rng, const InitOptions &options = {});

  Tensor<T> Forward(const Tensor<T> &x) const;
  // kConcatCh only.
  Tensor<T> Forward(const Tensor<T> &a, const Tensor<T> &b) const;

  std::vector<Tensor<T>> &params() { return params_; }
  const std::vector<Tensor<T>> &params() const { return params_; }
  void CollectParams(const std::string &prefix, ParamList<T> *out) const;

 private:
  LayerSpec spec_;
  std::vector<Tensor<T>> params_;
};

extern template class Layer<float>;
extern template class Layer<double>;

// Copies values by name from src into dst (same names, same sizes).
template <typename To, typename From>
void CopyParams(const ParamList<From> &src, ParamList<To> *dst);

}  // namespace pvse::nn

#endif  // PVSE_NN_LAYERS_H_
