// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/nn/ops.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "pvse/common/error.h"

namespace pvse::nn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

// Sequential sum. Eigen's vectorized reductions peel by address alignment,
// which makes the result depend on where the buffer landed on the heap.
template <typename Row>
auto RowSum(const Row &row) {
  typename Row::Scalar acc = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) acc += row(i);
  return acc;
}

// Upper bound on im2col buffer elements for one chunk of images.
constexpr size_t kMaxColumnElements = size_t{1} << 22;

void CheckSameDims(const Dims &a, const Dims &b, const char *what) {
  PVSE_CHECK(a == b, kShapeMismatch, what, ": ", DimsToString(a), " vs ",
             DimsToString(b));
}

struct ImageGeometry {
  int channels, in_h, in_w, k_h, k_w, stride_h, stride_w, pad_h, pad_w, out_h, out_w;

  size_t Rows() const { return static_cast<size_t>(channels) * k_h * k_w; }
  size_t Positions() const { return static_cast<size_t>(out_h) * out_w; }
};

// Writes the patches of one [c, in_h, in_w] image into columns
// [col0, col0 + out_h * out_w) of a row-major [rows, ld] buffer.
template <typename T>
void Im2Col(const T *image, const ImageGeometry &g, T *cols, size_t ld, size_t col0) {
  for (int c = 0; c < g.channels; ++c) {
    for (int kh = 0; kh < g.k_h; ++kh) {
      for (int kw = 0; kw < g.k_w; ++kw) {
        T *row = cols + ((static_cast<size_t>(c) * g.k_h + kh) * g.k_w + kw) * ld + col0;
        for (int oh = 0; oh < g.out_h; ++oh) {
          const int ih = oh * g.stride_h - g.pad_h + kh;
          T *dst = row + static_cast<size_t>(oh) * g.out_w;
          if (ih < 0 || ih >= g.in_h) {
            std::fill(dst, dst + g.out_w, T(0));
            continue;
          }
          const T *src = image + (static_cast<size_t>(c) * g.in_h + ih) * g.in_w;
          for (int ow = 0; ow < g.out_w; ++ow) {
            const int iw = ow * g.stride_w - g.pad_w + kw;
            dst[ow] = (iw >= 0 && iw < g.in_w) ? src[iw] : T(0);
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: accumulates columns back into the image.
template <typename T>
void Col2Im(const T *cols, const ImageGeometry &g, size_t ld, size_t col0, T *image) {
  for (int c = 0; c < g.channels; ++c) {
    for (int kh = 0; kh < g.k_h; ++kh) {
      for (int kw = 0; kw < g.k_w; ++kw) {
        const T *row =
            cols + ((static_cast<size_t>(c) * g.k_h + kh) * g.k_w + kw) * ld + col0;
        for (int oh = 0; oh < g.out_h; ++oh) {
          const int ih = oh * g.stride_h - g.pad_h + kh;
          if (ih < 0 || ih >= g.in_h) continue;
          const T *src = row + static_cast<size_t>(oh) * g.out_w;
          T *dst = image + (static_cast<size_t>(c) * g.in_h + ih) * g.in_w;
          for (int ow = 0; ow < g.out_w; ++ow) {
            const int iw = ow * g.stride_w - g.pad_w + kw;
            if (iw >= 0 && iw < g.in_w) dst[iw] += src[ow];
          }
        }
      }
    }
  }
}

size_t ImagesPerChunk(size_t rows, size_t positions, size_t n) {
  const size_t per_image = std::max<size_t>(1, rows * positions);
  return std::clamp<size_t>(kMaxColumnElements / per_image, 1, std::max<size_t>(n, 1));
}

// Gathers [n, c, p] (image-major) into a [c, n * p] matrix and back.
template <typename T>
void GatherChannels(const T *src, int n, int c, size_t p, T *dst) {
  for (int i = 0; i < n; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      std::copy_n(src + (static_cast<size_t>(i) * c + ch) * p, p,
                  dst + static_cast<size_t>(ch) * n * p + static_cast<size_t>(i) * p);
    }
  }
}

template <typename T>
void ScatterChannels(const T *src, int n, int c, size_t p, T *dst) {
  for (int i = 0; i < n; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      std::copy_n(src + static_cast<size_t>(ch) * n * p + static_cast<size_t>(i) * p, p,
                  dst + (static_cast<size_t>(i) * c + ch) * p);
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> Add(const Tensor<T> &a, const Tensor<T> &b) {
  CheckSameDims(a.dims(), b.dims(), "Add");
  std::vector<T> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  auto pa = a.shared_node(), pb = b.shared_node();
  return Tensor<T>::MakeResult(a.dims(), std::move(out), {a, b}, [pa, pb](Node<T> &self) {
    for (auto *p : {pa.get(), pb.get()}) {
      if (!p->requires_grad) continue;
      for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> AddBatchBias(const Tensor<T> &x, const Tensor<T> &bias) {
  PVSE_CHECK(x.rank() >= 1 && bias.rank() == x.rank() && bias.dim(0) == 1, kShapeMismatch,
             "AddBatchBias needs a bias with leading dim 1 and the same rank");
  for (size_t d = 1; d < x.rank(); ++d) {
    PVSE_CHECK(bias.dim(d) == x.dim(d), kShapeMismatch, "AddBatchBias dim ", d, " is ",
               bias.dim(d), ", expected ", x.dim(d));
  }
  const size_t per = bias.size();
  std::vector<T> out(x.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] + bias.data()[i % per];
  auto px = x.shared_node(), pb = bias.shared_node();
  return Tensor<T>::MakeResult(x.dims(), std::move(out), {x, bias}, [px, pb, per](Node<T> &self) {
    if (px->requires_grad) {
      for (size_t i = 0; i < self.grad.size(); ++i) px->grad[i] += self.grad[i];
    }
    if (pb->requires_grad) {
      for (size_t i = 0; i < self.grad.size(); ++i) pb->grad[i % per] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> Scale(const Tensor<T> &x, T factor) {
  std::vector<T> out(x.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = factor * x.data()[i];
  auto px = x.shared_node();
  return Tensor<T>::MakeResult(x.dims(), std::move(out), {x}, [px, factor](Node<T> &self) {
    for (size_t i = 0; i < self.grad.size(); ++i) px->grad[i] += factor * self.grad[i];
  });
}

template <typename T>
Tensor<T> Relu(const Tensor<T> &x) {
  std::vector<T> out(x.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::max(T(0), x.data()[i]);
  auto px = x.shared_node();
  return Tensor<T>::MakeResult(x.dims(), std::move(out), {x}, [px](Node<T> &self) {
    for (size_t i = 0; i < self.grad.size(); ++i) {
      if (px->value[i] > T(0)) px->grad[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> Sigmoid(const Tensor<T> &x) {
  std::vector<T> out(x.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const T v = x.data()[i];
    // Split by sign so exp never overflows.
    if (v >= T(0)) {
      out[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      out[i] = e / (T(1) + e);
    }
  }
  auto px = x.shared_node();
  return Tensor<T>::MakeResult(x.dims(), std::move(out), {x}, [px](Node<T> &self) {
    for (size_t i = 0; i < self.grad.size(); ++i) {
      const T s = self.value[i];
      px->grad[i] += self.grad[i] * s * (T(1) - s);
    }
  });
}

template <typename T>
Tensor<T> Conv1d(const Tensor<T> &x, const Tensor<T> &weight, const Tensor<T> &bias) {
  PVSE_CHECK(x.rank() == 3 && weight.rank() == 3 && bias.rank() == 1, kShapeMismatch,
             "Conv1d expects x [b,c,t], w [o,c,k], b [o]; got ", DimsToString(x.dims()),
             ", ", DimsToString(weight.dims()), ", ", DimsToString(bias.dims()));
  const int batch = x.dim(0), in_ch = x.dim(1), steps = x.dim(2);
  const int out_ch = weight.dim(0), k = weight.dim(2);
  PVSE_CHECK(weight.dim(1) == in_ch && bias.dim(0) == out_ch && k % 2 == 1,
             kShapeMismatch, "Conv1d channel/kernel mismatch: x ", DimsToString(x.dims()),
             " w ", DimsToString(weight.dims()));
  const int pad = k / 2;
  const size_t rows = static_cast<size_t>(in_ch) * k;
  const size_t ncols = static_cast<size_t>(batch) * steps;

  auto cols = std::make_shared<std::vector<T>>(rows * ncols, T(0));
  const T *xv = x.data().data();
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < in_ch; ++c) {
      const T *src = xv + (static_cast<size_t>(b) * in_ch + c) * steps;
      for (int j = 0; j < k; ++j) {
        T *dst = cols->data() + (static_cast<size_t>(c) * k + j) * ncols +
                 static_cast<size_t>(b) * steps;
        const int lo = std::max(0, pad - j), hi = std::min(steps, steps + pad - j);
        for (int t = lo; t < hi; ++t) dst[t] = src[t + j - pad];
      }
    }
  }
  RowMat<T> y(out_ch, static_cast<Eigen::Index>(ncols));
  y.noalias() = ConstMatMap<T>(weight.data().data(), out_ch, static_cast<Eigen::Index>(rows)) *
                ConstMatMap<T>(cols->data(), static_cast<Eigen::Index>(rows),
                               static_cast<Eigen::Index>(ncols));
  std::vector<T> out(static_cast<size_t>(batch) * out_ch * steps);
  for (int b = 0; b < batch; ++b) {
    for (int o = 0; o < out_ch; ++o) {
      T *dst = out.data() + (static_cast<size_t>(b) * out_ch + o) * steps;
      const T *src = y.data() + static_cast<size_t>(o) * ncols + static_cast<size_t>(b) * steps;
      const T bo = bias.data()[o];
      for (int t = 0; t < steps; ++t) dst[t] = src[t] + bo;
    }
  }

  auto px = x.shared_node(), pw = weight.shared_node(), pb = bias.shared_node();
  return Tensor<T>::MakeResult(
      {batch, out_ch, steps}, std::move(out), {x, weight, bias},
      [=](Node<T> &self) {
        RowMat<T> g(out_ch, static_cast<Eigen::Index>(ncols));
        for (int b = 0; b < batch; ++b) {
          for (int o = 0; o < out_ch; ++o) {
            std::copy_n(self.grad.data() + (static_cast<size_t>(b) * out_ch + o) * steps, steps,
                        g.data() + static_cast<size_t>(o) * ncols + static_cast<size_t>(b) * steps);
          }
        }
        ConstMatMap<T> colmat(cols->data(), static_cast<Eigen::Index>(rows),
                              static_cast<Eigen::Index>(ncols));
        if (pw->requires_grad) {
          MatMap<T>(pw->grad.data(), out_ch, static_cast<Eigen::Index>(rows)).noalias() +=
              g * colmat.transpose();
        }
        if (pb->requires_grad) {
          for (int o = 0; o < out_ch; ++o) pb->grad[o] += RowSum(g.row(o));
        }
        if (px->requires_grad) {
          RowMat<T> dcols(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(ncols));
          dcols.noalias() =
              ConstMatMap<T>(pw->value.data(), out_ch, static_cast<Eigen::Index>(rows)).transpose() * g;
          for (int b = 0; b < batch; ++b) {
            for (int c = 0; c < in_ch; ++c) {
              T *dst = px->grad.data() + (static_cast<size_t>(b) * in_ch + c) * steps;
              for (int j = 0; j < k; ++j) {
                const T *src = dcols.data() + (static_cast<size_t>(c) * k + j) * ncols +
                               static_cast<size_t>(b) * steps;
                const int lo = std::max(0, pad - j), hi = std::min(steps, steps + pad - j);
                for (int t = lo; t < hi; ++t) dst[t + j - pad] += src[t];
              }
            }
          }
        }
      });
}

template <typename T>
Tensor<T> Conv2d(const Tensor<T> &x, const Tensor<T> &weight, const Tensor<T> &bias,
                 const Conv2dGeometry &geo) {
  PVSE_CHECK(x.rank() == 4 && weight.rank() == 4 && bias.rank() == 1, kShapeMismatch,
             "Conv2d expects x [n,c,h,w], w [o,c,kh,kw], b [o]; got ",
             DimsToString(x.dims()), ", ", DimsToString(weight.dims()));
  const int n = x.dim(0), in_ch = x.dim(1), in_h = x.dim(2), in_w = x.dim(3);
  const int out_ch = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
  PVSE_CHECK(weight.dim(1) == in_ch && bias.dim(0) == out_ch, kShapeMismatch,
             "Conv2d channel mismatch: x ", DimsToString(x.dims()), " w ",
             DimsToString(weight.dims()));
  PVSE_CHECK(geo.stride_h > 0 && geo.stride_w > 0, kShapeMismatch, "bad stride");
  const int out_h = (in_h + 2 * geo.pad_h - kh) / geo.stride_h + 1;
  const int out_w = (in_w + 2 * geo.pad_w - kw) / geo.stride_w + 1;
  PVSE_CHECK(out_h > 0 && out_w > 0, kShapeMismatch, "Conv2d output would be empty");

  const ImageGeometry g{in_ch, in_h, in_w, kh, kw, geo.stride_h, geo.stride_w,
                        geo.pad_h, geo.pad_w, out_h, out_w};
  const size_t rows = g.Rows(), pos = g.Positions();
  const size_t in_size = static_cast<size_t>(in_ch) * in_h * in_w;
  const size_t out_size = static_cast<size_t>(out_ch) * pos;
  const size_t chunk = ImagesPerChunk(rows, pos, static_cast<size_t>(n));
  const auto erows = static_cast<Eigen::Index>(rows);

  std::vector<T> out(static_cast<size_t>(n) * out_size);
  std::vector<T> cols, y;
  for (size_t first = 0; first < static_cast<size_t>(n); first += chunk) {
    const int count = static_cast<int>(std::min(chunk, static_cast<size_t>(n) - first));
    const size_t ld = count * pos;
    cols.resize(rows * ld);
    for (int i = 0; i < count; ++i) {
      Im2Col(x.data().data() + (first + i) * in_size, g, cols.data(), ld, i * pos);
    }
    y.resize(out_ch * ld);
    MatMap<T>(y.data(), out_ch, static_cast<Eigen::Index>(ld)).noalias() =
        ConstMatMap<T>(weight.data().data(), out_ch, erows) *
        ConstMatMap<T>(cols.data(), erows, static_cast<Eigen::Index>(ld));
    ScatterChannels(y.data(), count, out_ch, pos, out.data() + first * out_size);
  }
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < out_ch; ++o) {
      T *dst = out.data() + i * out_size + o * pos;
      const T bo = bias.data()[o];
      for (size_t p = 0; p < pos; ++p) dst[p] += bo;
    }
  }

  auto px = x.shared_node(), pw = weight.shared_node(), pb = bias.shared_node();
  return Tensor<T>::MakeResult(
      {n, out_ch, out_h, out_w}, std::move(out), {x, weight, bias},
      [=](Node<T> &self) {
        std::vector<T> cols, gmat, dcols;
        for (size_t first = 0; first < static_cast<size_t>(n); first += chunk) {
          const int count = static_cast<int>(std::min(chunk, static_cast<size_t>(n) - first));
          const size_t ld = count * pos;
          const auto eld = static_cast<Eigen::Index>(ld);
          gmat.resize(out_ch * ld);
          GatherChannels(self.grad.data() + first * out_size, count, out_ch, pos, gmat.data());
          ConstMatMap<T> gm(gmat.data(), out_ch, eld);
          if (pb->requires_grad) {
            for (int o = 0; o < out_ch; ++o) pb->grad[o] += RowSum(gm.row(o));
          }
          if (pw->requires_grad) {
            cols.resize(rows * ld);
            for (int i = 0; i < count; ++i) {
              Im2Col(px->value.data() + (first + i) * in_size, g, cols.data(), ld, i * pos);
            }
            MatMap<T>(pw->grad.data(), out_ch, erows).noalias() +=
                gm * ConstMatMap<T>(cols.data(), erows, eld).transpose();
          }
          if (px->requires_grad) {
            dcols.resize(rows * ld);
            MatMap<T>(dcols.data(), erows, eld).noalias() =
                ConstMatMap<T>(pw->value.data(), out_ch, erows).transpose() * gm;
            for (int i = 0; i < count; ++i) {
              Col2Im(dcols.data(), g, ld, i * pos, px->grad.data() + (first + i) * in_size);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> ConvTranspose2d(const Tensor<T> &x, const Tensor<T> &weight,
                          const Tensor<T> &bias, const Conv2dGeometry &geo) {
  PVSE_CHECK(x.rank() == 4 && weight.rank() == 4 && bias.rank() == 1, kShapeMismatch,
             "ConvTranspose2d expects x [n,c,h,w], w [c,o,kh,kw], b [o]; got ",
             DimsToString(x.dims()), ", ", DimsToString(weight.dims()));
  const int n = x.dim(0), in_ch = x.dim(1), in_h = x.dim(2), in_w = x.dim(3);
  const int out_ch = weight.dim(1), kh = weight.dim(2), kw = weight.dim(3);
  PVSE_CHECK(weight.dim(0) == in_ch && bias.dim(0) == out_ch, kShapeMismatch,
             "ConvTranspose2d channel mismatch: x ", DimsToString(x.dims()), " w ",
             DimsToString(weight.dims()));
  const int out_h = (in_h - 1) * geo.stride_h - 2 * geo.pad_h + kh;
  const int out_w = (in_w - 1) * geo.stride_w - 2 * geo.pad_w + kw;
  PVSE_CHECK(out_h > 0 && out_w > 0, kShapeMismatch, "ConvTranspose2d output would be empty");

  // Geometry of the forward convolution this op is the adjoint of: it maps
  // the [out_ch, out_h, out_w] image onto in_h x in_w positions.
  const ImageGeometry g{out_ch, out_h, out_w, kh, kw, geo.stride_h, geo.stride_w,
                        geo.pad_h, geo.pad_w, in_h, in_w};
  const size_t rows = g.Rows(), pos = g.Positions();
  const size_t in_size = static_cast<size_t>(in_ch) * pos;
  const size_t out_size = static_cast<size_t>(out_ch) * out_h * out_w;
  const size_t chunk = ImagesPerChunk(rows, pos, static_cast<size_t>(n));
  const auto erows = static_cast<Eigen::Index>(rows);

  std::vector<T> out(static_cast<size_t>(n) * out_size, T(0));
  std::vector<T> xmat, cols;
  for (size_t first = 0; first < static_cast<size_t>(n); first += chunk) {
    const int count = static_cast<int>(std::min(chunk, static_cast<size_t>(n) - first));
    const size_t ld = count * pos;
    const auto eld = static_cast<Eigen::Index>(ld);
    xmat.resize(in_ch * ld);
    GatherChannels(x.data().data() + first * in_size, count, in_ch, pos, xmat.data());
    cols.resize(rows * ld);
    MatMap<T>(cols.data(), erows, eld).noalias() =
        ConstMatMap<T>(weight.data().data(), in_ch, erows).transpose() *
        ConstMatMap<T>(xmat.data(), in_ch, eld);
    for (int i = 0; i < count; ++i) {
      Col2Im(cols.data(), g, ld, i * pos, out.data() + (first + i) * out_size);
    }
  }
  const size_t plane = static_cast<size_t>(out_h) * out_w;
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < out_ch; ++o) {
      T *dst = out.data() + i * out_size + o * plane;
      const T bo = bias.data()[o];
      for (size_t p = 0; p < plane; ++p) dst[p] += bo;
    }
  }

  auto px = x.shared_node(), pw = weight.shared_node(), pb = bias.shared_node();
  return Tensor<T>::MakeResult(
      {n, out_ch, out_h, out_w}, std::move(out), {x, weight, bias},
      [=](Node<T> &self) {
        if (pb->requires_grad) {
          for (int i = 0; i < n; ++i) {
            for (int o = 0; o < out_ch; ++o) {
              const T *src = self.grad.data() + i * out_size + o * plane;
              T acc = T(0);
              for (size_t p = 0; p < plane; ++p) acc += src[p];
              pb->grad[o] += acc;
            }
          }
        }
        if (!pw->requires_grad && !px->requires_grad) return;
        std::vector<T> dcols, xmat, dx;
        for (size_t first = 0; first < static_cast<size_t>(n); first += chunk) {
          const int count = static_cast<int>(std::min(chunk, static_cast<size_t>(n) - first));
          const size_t ld = count * pos;
          const auto eld = static_cast<Eigen::Index>(ld);
          dcols.resize(rows * ld);
          for (int i = 0; i < count; ++i) {
            Im2Col(self.grad.data() + (first + i) * out_size, g, dcols.data(), ld, i * pos);
          }
          ConstMatMap<T> dc(dcols.data(), erows, eld);
          if (pw->requires_grad) {
            xmat.resize(in_ch * ld);
            GatherChannels(px->value.data() + first * in_size, count, in_ch, pos, xmat.data());
            MatMap<T>(pw->grad.data(), in_ch, erows).noalias() +=
                ConstMatMap<T>(xmat.data(), in_ch, eld) * dc.transpose();
          }
          if (px->requires_grad) {
            dx.resize(in_ch * ld);
            MatMap<T>(dx.data(), in_ch, eld).noalias() =
                ConstMatMap<T>(pw->value.data(), in_ch, erows) * dc;
            for (int i = 0; i < count; ++i) {
              for (int c = 0; c < in_ch; ++c) {
                const T *src = dx.data() + static_cast<size_t>(c) * ld + i * pos;
                T *dst = px->grad.data() + (first + i) * in_size + c * pos;
                for (size_t p = 0; p < pos; ++p) dst[p] += src[p];
              }
            }
          }
        }
      });
}

template <typename T>
Tensor<T> UpsampleNearestT(const Tensor<T> &x, int factor) {
  PVSE_CHECK(x.rank() == 3, kShapeMismatch, "UpsampleNearestT expects [b,c,t], got ",
             DimsToString(x.dims()));
  PVSE_CHECK(factor >= 1, kInvalidArgument, "upsample factor must be >= 1");
  const int rows = x.dim(0) * x.dim(1), steps = x.dim(2);
  std::vector<T> out(static_cast<size_t>(rows) * steps * factor);
  for (int r = 0; r < rows; ++r) {
    for (int t = 0; t < steps; ++t) {
      const T v = x.data()[static_cast<size_t>(r) * steps + t];
      for (int f = 0; f < factor; ++f) {
        out[(static_cast<size_t>(r) * steps + t) * factor + f] = v;
      }
    }
  }
  auto px = x.shared_node();
  return Tensor<T>::MakeResult(
      {x.dim(0), x.dim(1), steps * factor}, std::move(out), {x},
      [px, rows, steps, factor](Node<T> &self) {
        for (int r = 0; r < rows; ++r) {
          for (int t = 0; t < steps; ++t) {
            T acc = T(0);
            for (int f = 0; f < factor; ++f) {
              acc += self.grad[(static_cast<size_t>(r) * steps + t) * factor + f];
            }
            px->grad[static_cast<size_t>(r) * steps + t] += acc;
          }
        }
      });
}

template <typename T>
Tensor<T> ConcatChannels(const Tensor<T> &a, const Tensor<T> &b) {
  PVSE_CHECK(a.rank() >= 2 && a.rank() == b.rank() && a.dim(0) == b.dim(0),
             kShapeMismatch, "ConcatChannels: ", DimsToString(a.dims()), " vs ",
             DimsToString(b.dims()));
  size_t inner = 1;
  for (size_t i = 2; i < a.rank(); ++i) {
    PVSE_CHECK(a.dim(i) == b.dim(i), kShapeMismatch, "ConcatChannels: ",
               DimsToString(a.dims()), " vs ", DimsToString(b.dims()));
    inner *= static_cast<size_t>(a.dim(i));
  }
  const int batch = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  const size_t sa = ca * inner, sb = cb * inner;
  std::vector<T> out(static_cast<size_t>(batch) * (sa + sb));
  for (int i = 0; i < batch; ++i) {
    std::copy_n(a.data().data() + i * sa, sa, out.data() + i * (sa + sb));
    std::copy_n(b.data().data() + i * sb, sb, out.data() + i * (sa + sb) + sa);
  }
  Dims dims = a.dims();
  dims[1] = ca + cb;
  auto pa = a.shared_node(), pb = b.shared_node();
  return Tensor<T>::MakeResult(dims, std::move(out), {a, b},
                               [pa, pb, batch, sa, sb](Node<T> &self) {
    for (int i = 0; i < batch; ++i) {
      const T *src = self.grad.data() + i * (sa + sb);
      if (pa->requires_grad) {
        for (size_t j = 0; j < sa; ++j) pa->grad[i * sa + j] += src[j];
      }
      if (pb->requires_grad) {
        for (size_t j = 0; j < sb; ++j) pb->grad[i * sb + j] += src[sa + j];
      }
    }
  });
}

template <typename T>
Tensor<T> GlobalAvgPool2d(const Tensor<T> &x) {
  PVSE_CHECK(x.rank() == 4, kShapeMismatch, "GlobalAvgPool2d expects [n,c,h,w], got ",
             DimsToString(x.dims()));
  const int rows = x.dim(0) * x.dim(1);
  const size_t plane = static_cast<size_t>(x.dim(2)) * x.dim(3);
  std::vector<T> out(static_cast<size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    T acc = T(0);
    for (size_t p = 0; p < plane; ++p) acc += x.data()[r * plane + p];
    out[r] = acc / static_cast<T>(plane);
  }
  auto px = x.shared_node();
  return Tensor<T>::MakeResult({x.dim(0), x.dim(1)}, std::move(out), {x},
                               [px, rows, plane](Node<T> &self) {
    for (int r = 0; r < rows; ++r) {
      const T g = self.grad[r] / static_cast<T>(plane);
      for (size_t p = 0; p < plane; ++p) px->grad[r * plane + p] += g;
    }
  });
}

template <typename T>
Tensor<T> Reshape(const Tensor<T> &x, const Dims &dims) {
  PVSE_CHECK(NumElements(dims) == x.size(), kShapeMismatch, "cannot reshape ",
             DimsToString(x.dims()), " to ", DimsToString(dims));
  auto px = x.shared_node();
  return Tensor<T>::MakeResult(dims, x.values(), {x}, [px](Node<T> &self) {
    for (size_t i = 0; i < self.grad.size(); ++i) px->grad[i] += self.grad[i];
  });
}

template <typename T>
Tensor<T> SwapLastAxes(const Tensor<T> &x) {
  PVSE_CHECK(x.rank() == 3, kShapeMismatch, "SwapLastAxes expects rank 3, got ",
             DimsToString(x.dims()));
  const int batch = x.dim(0), a = x.dim(1), c = x.dim(2);
  std::vector<T> out(x.size());
  for (int b = 0; b < batch; ++b) {
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < c; ++j) {
        out[(static_cast<size_t>(b) * c + j) * a + i] =
            x.data()[(static_cast<size_t>(b) * a + i) * c + j];
      }
    }
  }
  auto px = x.shared_node();
  return Tensor<T>::MakeResult({batch, c, a}, std::move(out), {x},
                               [px, batch, a, c](Node<T> &self) {
    for (int b = 0; b < batch; ++b) {
      for (int i = 0; i < a; ++i) {
        for (int j = 0; j < c; ++j) {
          px->grad[(static_cast<size_t>(b) * a + i) * c + j] +=
              self.grad[(static_cast<size_t>(b) * c + j) * a + i];
        }
      }
    }
  });
}

template <typename T>
Tensor<T> L1Loss(const Tensor<T> &pred, const Tensor<T> &target) {
  CheckSameDims(pred.dims(), target.dims(), "L1Loss");
  PVSE_CHECK(pred.size() > 0, kShapeMismatch, "L1Loss on empty tensors");
  T acc = T(0);
  for (size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred.data()[i] - target.data()[i]);
  const T n = static_cast<T>(pred.size());
  auto pp = pred.shared_node(), pt = target.shared_node();
  return Tensor<T>::MakeResult({1}, {acc / n}, {pred, target}, [pp, pt, n](Node<T> &self) {
    const T g = self.grad[0] / n;
    for (size_t i = 0; i < pp->value.size(); ++i) {
      const T d = pp->value[i] - pt->value[i];
      const T s = d > T(0) ? g : (d < T(0) ? -g : T(0));
      if (pp->requires_grad) pp->grad[i] += s;
      if (pt->requires_grad) pt->grad[i] -= s;
    }
  });
}

template <typename T>
Tensor<T> Mean(const Tensor<T> &x) {
  PVSE_CHECK(x.size() > 0, kShapeMismatch, "Mean of empty tensor");
  T acc = T(0);
  for (T v : x.data()) acc += v;
  const T n = static_cast<T>(x.size());
  auto px = x.shared_node();
  return Tensor<T>::MakeResult({1}, {acc / n}, {x}, [px, n](Node<T> &self) {
    const T g = self.grad[0] / n;
    for (auto &v : px->grad) v += g;
  });
}

template <typename T>
Tensor<T> WeightedSum(const Tensor<T> &x, const Tensor<T> &w) {
  CheckSameDims(x.dims(), w.dims(), "WeightedSum");
  T acc = T(0);
  for (size_t i = 0; i < x.size(); ++i) acc += x.data()[i] * w.data()[i];
  auto px = x.shared_node(), pw = w.shared_node();
  return Tensor<T>::MakeResult({1}, {acc}, {x, w}, [px, pw](Node<T> &self) {
    const T g = self.grad[0];
    for (size_t i = 0; i < px->value.size(); ++i) {
      if (px->requires_grad) px->grad[i] += g * pw->value[i];
      if (pw->requires_grad) pw->grad[i] += g * px->value[i];
    }
  });
}

#define PVSE_INSTANTIATE_OPS(T)                                                        \
  template Tensor<T> Add(const Tensor<T> &, const Tensor<T> &);                        \
  template Tensor<T> AddBatchBias(const Tensor<T> &, const Tensor<T> &);               \
  template Tensor<T> Scale(const Tensor<T> &, T);                                      \
  template Tensor<T> Relu(const Tensor<T> &);                                          \
  template Tensor<T> Sigmoid(const Tensor<T> &);                                       \
  template Tensor<T> Conv1d(const Tensor<T> &, const Tensor<T> &, const Tensor<T> &);  \
  template Tensor<T> Conv2d(const Tensor<T> &, const Tensor<T> &, const Tensor<T> &,   \
                            const Conv2dGeometry &);                                   \
  template Tensor<T> ConvTranspose2d(const Tensor<T> &, const Tensor<T> &,             \
                                     const Tensor<T> &, const Conv2dGeometry &);       \
  template Tensor<T> UpsampleNearestT(const Tensor<T> &, int);                         \
  template Tensor<T> ConcatChannels(const Tensor<T> &, const Tensor<T> &);             \
  template Tensor<T> GlobalAvgPool2d(const Tensor<T> &);                               \
  template Tensor<T> Reshape(const Tensor<T> &, const Dims &);                         \
  template Tensor<T> SwapLastAxes(const Tensor<T> &);                                  \
  template Tensor<T> L1Loss(const Tensor<T> &, const Tensor<T> &);                     \
  template Tensor<T> Mean(const Tensor<T> &);                                          \
  template Tensor<T> WeightedSum(const Tensor<T> &, const Tensor<T> &);

PVSE_INSTANTIATE_OPS(float)
PVSE_INSTANTIATE_OPS(double)

#undef PVSE_INSTANTIATE_OPS

}  // namespace pvse::nn
