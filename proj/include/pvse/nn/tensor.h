// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_NN_TENSOR_H_
#define PVSE_NN_TENSOR_H_

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pvse::nn {

using Dims = std::vector<int>;

size_t NumElements(const Dims &dims);
std::string DimsToString(const Dims &dims);

template <typename T>
struct Node {
  Dims dims;
  std::vector<T> value;
  std::vector<T> grad;  // empty until a backward pass reaches the node
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node &)> backward;

  void EnsureGrad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
};

// Recording is on by default; a NoGradGuard turns it off for the current
// thread (inference, finite differences).
bool GradEnabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

 private:
  bool previous_;
};

// Row-major n-d array with an optional gradient slot. Copies share the
// underlying node; Clone() makes an independent leaf.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(const Dims &dims, bool requires_grad = false);
  static Tensor Full(const Dims &dims, T value, bool requires_grad = false);
  static Tensor FromData(const Dims &dims, std::vector<T> data,
                         bool requires_grad = false);

  // Builds an op output. The backward function is kept only when recording
  // is enabled and some parent requires grad.
  static Tensor MakeResult(const Dims &dims, std::vector<T> value,
                           const std::vector<Tensor> &parents,
                           std::function<void(Node<T> &)> backward);

  bool defined() const { return node_ != nullptr; }
  const Dims &dims() const { return node_->dims; }
  int dim(size_t i) const { return node_->dims.at(i); }
  size_t rank() const { return node_->dims.size(); }
  size_t size() const { return node_->value.size(); }

  std::span<T> data() { return node_->value; }
  std::span<const T> data() const { return node_->value; }
  const std::vector<T> &values() const { return node_->value; }
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool flag) { node_->requires_grad = flag; }
  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  std::span<T> grad();
  std::span<const T> grad() const;
  void ZeroGrad();

  // Back-propagates from a scalar. Throws GraphNotRecorded when no recorded
  // graph leads to this tensor, ShapeMismatch when it is not a scalar.
  void Backward();

  // New leaf holding a copy of the values.
  Tensor Clone() const;
  // Leaf sharing nothing with the graph; values copied.
  Tensor Detach() const { return Clone(); }

  Node<T> *node() const { return node_.get(); }
  const std::shared_ptr<Node<T>> &shared_node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}
  std::shared_ptr<Node<T>> node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

template <typename To, typename From>
Tensor<To> CastTensor(const Tensor<From> &src, bool requires_grad = false) {
  std::vector<To> out(src.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<To>(src.data()[i]);
  return Tensor<To>::FromData(src.dims(), std::move(out), requires_grad);
}

}  // namespace pvse::nn

#endif  // PVSE_NN_TENSOR_H_
