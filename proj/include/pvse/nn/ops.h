// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_NN_OPS_H_
#define PVSE_NN_OPS_H_

#include "pvse/nn/tensor.h"

namespace pvse::nn {

// All ops throw ShapeMismatch on incompatible inputs. Sequence features use
// [batch, channels, time]; images use [batch, channels, height, width].

template <typename T> Tensor<T> Add(const Tensor<T> &a, const Tensor<T> &b);
// x [B, ...] plus bias [1, ...] repeated over the batch.
template <typename T> Tensor<T> AddBatchBias(const Tensor<T> &x, const Tensor<T> &bias);
template <typename T> Tensor<T> Scale(const Tensor<T> &x, T factor);
template <typename T> Tensor<T> Relu(const Tensor<T> &x);
template <typename T> Tensor<T> Sigmoid(const Tensor<T> &x);

// Same-padded (zero) stride-1 convolution over time. weight [out, in, k] with
// odd k, bias [out].
template <typename T>
Tensor<T> Conv1d(const Tensor<T> &x, const Tensor<T> &weight, const Tensor<T> &bias);

struct Conv2dGeometry {
  int stride_h = 1, stride_w = 1;
  int pad_h = 0, pad_w = 0;
};

// weight [out, in, kh, kw], bias [out].
template <typename T>
Tensor<T> Conv2d(const Tensor<T> &x, const Tensor<T> &weight, const Tensor<T> &bias,
                 const Conv2dGeometry &geo);

// Transposed convolution: the adjoint of Conv2d with the same geometry.
// weight [in, out, kh, kw], bias [out]. Output size (h - 1) * s - 2p + k.
template <typename T>
Tensor<T> ConvTranspose2d(const Tensor<T> &x, const Tensor<T> &weight,
                          const Tensor<T> &bias, const Conv2dGeometry &geo);

// [b, c, t] -> [b, c, t * factor]; every time step repeated factor times.
template <typename T> Tensor<T> UpsampleNearestT(const Tensor<T> &x, int factor);

// Concatenation along axis 1; all other axes must agree.
template <typename T> Tensor<T> ConcatChannels(const Tensor<T> &a, const Tensor<T> &b);

// [n, c, h, w] -> [n, c].
template <typename T> Tensor<T> GlobalAvgPool2d(const Tensor<T> &x);

// Same element count, new dims.
template <typename T> Tensor<T> Reshape(const Tensor<T> &x, const Dims &dims);

// [b, a, c] -> [b, c, a].
template <typename T> Tensor<T> SwapLastAxes(const Tensor<T> &x);

// Mean absolute difference; subgradient sign(pred - target) / n with 0 at
// ties.
template <typename T> Tensor<T> L1Loss(const Tensor<T> &pred, const Tensor<T> &target);

template <typename T> Tensor<T> Mean(const Tensor<T> &x);

// Sum of x * w for a constant weight tensor (gradient checks).
template <typename T> Tensor<T> WeightedSum(const Tensor<T> &x, const Tensor<T> &w);

}  // namespace pvse::nn

#endif  // PVSE_NN_OPS_H_
