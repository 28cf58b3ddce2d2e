// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/nn/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "pvse/common/error.h"

namespace pvse::nn {
namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

size_t NumElements(const Dims &dims) {
  size_t n = 1;
  for (int d : dims) {
    PVSE_CHECK(d >= 0, kShapeMismatch, "negative dimension in ", DimsToString(dims));
    n *= static_cast<size_t>(d);
  }
  return n;
}

std::string DimsToString(const Dims &dims) {
  std::ostringstream oss;
  oss << '[';
  for (size_t i = 0; i < dims.size(); ++i) oss << (i ? "," : "") << dims[i];
  oss << ']';
  return oss.str();
}

bool GradEnabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
Tensor<T> Tensor<T>::Zeros(const Dims &dims, bool requires_grad) {
  return Full(dims, T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::Full(const Dims &dims, T value, bool requires_grad) {
  auto node = std::make_shared<Node<T>>();
  node->dims = dims;
  node->value.assign(NumElements(dims), value);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::FromData(const Dims &dims, std::vector<T> data,
                              bool requires_grad) {
  PVSE_CHECK(NumElements(dims) == data.size(), kShapeMismatch, "dims ",
             DimsToString(dims), " need ", NumElements(dims), " values, got ",
             data.size());
  auto node = std::make_shared<Node<T>>();
  node->dims = dims;
  node->value = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::MakeResult(const Dims &dims, std::vector<T> value,
                                const std::vector<Tensor> &parents,
                                std::function<void(Node<T> &)> backward) {
  auto node = std::make_shared<Node<T>>();
  node->dims = dims;
  node->value = std::move(value);
  if (GradEnabled()) {
    const bool any = std::any_of(parents.begin(), parents.end(),
                                 [](const Tensor &p) { return p.requires_grad(); });
    if (any) {
      node->requires_grad = true;
      node->backward = std::move(backward);
      for (const auto &p : parents) node->parents.push_back(p.node_);
    }
  }
  return Tensor(std::move(node));
}

template <typename T>
T Tensor<T>::item() const {
  PVSE_CHECK(size() == 1, kShapeMismatch, "item() on tensor of shape ",
             DimsToString(dims()));
  return node_->value[0];
}

template <typename T>
std::span<T> Tensor<T>::grad() {
  node_->EnsureGrad();
  return node_->grad;
}

template <typename T>
std::span<const T> Tensor<T>::grad() const {
  node_->EnsureGrad();
  return node_->grad;
}

template <typename T>
void Tensor<T>::ZeroGrad() {
  node_->grad.assign(node_->value.size(), T(0));
}

template <typename T>
void Tensor<T>::Backward() {
  PVSE_CHECK(defined(), kGraphNotRecorded, "backward on undefined tensor");
  PVSE_CHECK(size() == 1, kShapeMismatch, "backward needs a scalar, got ",
             DimsToString(dims()));
  PVSE_CHECK(node_->requires_grad && node_->backward, kGraphNotRecorded,
             "no recorded graph leads to this tensor");

  // Iterative post-order DFS gives a topological order.
  std::vector<Node<T> *> order;
  std::unordered_set<Node<T> *> visited;
  std::vector<std::pair<Node<T> *, size_t>> stack{{node_.get(), 0}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto &[n, next] = stack.back();
    if (next < n->parents.size()) {
      Node<T> *p = n->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->grad.assign(1, T(1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T> *n = *it;
    if (!n->backward) continue;
    n->EnsureGrad();
    for (auto &p : n->parents) {
      if (p->requires_grad) p->EnsureGrad();
    }
    n->backward(*n);
  }
}

template <typename T>
Tensor<T> Tensor<T>::Clone() const {
  return FromData(dims(), node_->value, false);
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace pvse::nn
