// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/tensor.hpp"

#include <cmath>
#include <cstring>
#include <unordered_map>

namespace genefx {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
bool bit_identical(const NdArray<T>& a, const NdArray<T>& b) {
  if (a.shape() != b.shape()) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(T)) == 0;
}

template <typename T>
bool all_finite(const NdArray<T>& a) {
  for (T v : a.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <typename T>
T max_abs_diff(const NdArray<T>& a, const NdArray<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("max_abs_diff: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  T m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

namespace detail {

namespace {
thread_local bool t_grad_enabled = true;
}  // namespace

bool grad_enabled() noexcept { return t_grad_enabled; }

template <typename T>
NdArray<T>& Node<T>::grad_buffer() {
  if (!grad) grad.emplace(value.shape(), T{0});
  return *grad;
}

template <typename T>
GradTape<T>::GradTape(const std::shared_ptr<Node<T>>& root) {
  // Iterative post-order DFS; parents land before children.
  std::unordered_map<const Node<T>*, bool> visited;
  std::vector<std::pair<std::shared_ptr<Node<T>>, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited[root.get()] = true;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      auto parent = node->parents[next++];
      if (parent->consumed) {
        throw StateError("backward: graph already consumed by a previous backward");
      }
      if (parent->requires_grad && !visited[parent.get()]) {
        visited[parent.get()] = true;
        stack.emplace_back(parent, 0);
      }
    } else {
      order_.push_back(node);
      stack.pop_back();
    }
  }
}

template <typename T>
long GradTape<T>::index_of(const Node<T>* node) const {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i].get() == node) return static_cast<long>(i);
  }
  return -1;
}

template <typename T>
void GradTape<T>::run() {
  auto& root = order_.back();
  root->grad_buffer().fill(T{1});
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    Node<T>& node = **it;
    if (node.is_leaf()) continue;
    if (node.grad && node.backward_fn) node.backward_fn(node);
    // Interior nodes release their history so the graph cannot be replayed.
    node.grad.reset();
    node.backward_fn = nullptr;
    node.parents.clear();
    node.consumed = true;
  }
}

template struct Node<float>;
template struct Node<double>;
template class GradTape<float>;
template class GradTape<double>;

}  // namespace detail

NoGradGuard::NoGradGuard() : previous_(detail::t_grad_enabled) { detail::t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { detail::t_grad_enabled = previous_; }

template <typename T>
Tensor<T>::Tensor(NdArray<T> value, bool requires_grad)
    : node_(std::make_shared<detail::Node<T>>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

template <typename T>
const NdArray<T>& Tensor<T>::value() const {
  if (!node_) throw StateError("Tensor: undefined tensor");
  return node_->value;
}

template <typename T>
NdArray<T>& Tensor<T>::mutable_value() {
  if (!node_) throw StateError("Tensor: undefined tensor");
  if (!node_->is_leaf()) throw StateError("Tensor: mutable_value on a non-leaf tensor");
  return node_->value;
}

template <typename T>
bool Tensor<T>::requires_grad() const {
  return node_ && node_->requires_grad;
}

template <typename T>
void Tensor<T>::set_requires_grad(bool on) {
  if (!node_) throw StateError("Tensor: undefined tensor");
  if (!node_->is_leaf()) throw StateError("Tensor: requires_grad can only be set on leaves");
  node_->requires_grad = on;
  if (!on) node_->grad.reset();
}

template <typename T>
bool Tensor<T>::is_leaf() const {
  return node_ && node_->is_leaf();
}

template <typename T>
bool Tensor<T>::has_grad() const {
  return node_ && node_->grad.has_value();
}

template <typename T>
const NdArray<T>& Tensor<T>::grad() const {
  if (!has_grad()) throw StateError("Tensor: no gradient accumulated");
  return *node_->grad;
}

template <typename T>
void Tensor<T>::zero_grad() {
  if (node_) node_->grad.reset();
}

template <typename T>
void Tensor<T>::backward() {
  if (!node_) throw StateError("backward: undefined tensor");
  if (node_->consumed) throw StateError("backward: graph already consumed by a previous backward");
  if (node_->value.size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " +
                        shape_str(node_->value.shape()));
  }
  if (!node_->requires_grad) throw ContractError("backward: loss does not require grad");
  detail::GradTape<T> tape(node_);
  tape.run();
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(value(), false);
}

template <typename T>
Tensor<T> Tensor<T>::clone(bool requires_grad) const {
  return Tensor(value(), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::from_op(NdArray<T> value, std::vector<Tensor> inputs,
                             std::function<void(detail::Node<T>&)> backward_fn) {
#ifndef NDEBUG
  if (!all_finite(value)) throw NumericError("non-finite value produced by tensor op");
#endif
  Tensor out(std::move(value), false);
  if (!detail::grad_enabled()) return out;
  bool track = false;
  for (const auto& in : inputs) track = track || in.requires_grad();
  if (!track) return out;
  out.node_->requires_grad = true;
  for (auto& in : inputs) out.node_->parents.push_back(in.node_);
  out.node_->backward_fn = std::move(backward_fn);
  return out;
}

template class Tensor<float>;
template class Tensor<double>;

template bool bit_identical(const NdArray<float>&, const NdArray<float>&);
template bool bit_identical(const NdArray<double>&, const NdArray<double>&);
template bool all_finite(const NdArray<float>&);
template bool all_finite(const NdArray<double>&);
template float max_abs_diff(const NdArray<float>&, const NdArray<float>&);
template double max_abs_diff(const NdArray<double>&, const NdArray<double>&);

}  // namespace genefx
