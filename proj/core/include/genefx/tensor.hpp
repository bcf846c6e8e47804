// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "genefx/ndarray.hpp"

namespace genefx {

template <typename T>
class Tensor;

namespace detail {

template <typename T>
struct Node {
  NdArray<T> value;
  std::optional<NdArray<T>> grad;
  bool requires_grad = false;
  // Set once backward() has run through this node as an interior node.
  bool consumed = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad and accumulates into parents' grads.
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const noexcept { return !consumed && !backward_fn && parents.empty(); }
  NdArray<T>& grad_buffer();
};

/// Reverse-topological schedule of the graph reachable from a root.
template <typename T>
class GradTape {
 public:
  explicit GradTape(const std::shared_ptr<Node<T>>& root);

  /// Seeds the root with ones and runs every backward rule once.
  void run();

  std::size_t size() const noexcept { return order_.size(); }
  /// Topological index of a node (parents before children), or -1 if absent.
  long index_of(const Node<T>* node) const;

 private:
  std::vector<std::shared_ptr<Node<T>>> order_;
};

bool grad_enabled() noexcept;

}  // namespace detail

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Autograd handle: a shared node holding a value, an optional gradient buffer and the
/// backward rule that produced it. Copies alias the same node; use clone() for a deep copy.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(NdArray<T> value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const NdArray<T>& value() const;
  /// Mutable access for optimizers and resets. Only legal on leaves.
  NdArray<T>& mutable_value();
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
  std::size_t dim(std::size_t axis) const { return value().dim(axis); }

  bool requires_grad() const;
  void set_requires_grad(bool on);
  bool is_leaf() const;

  bool has_grad() const;
  /// Throws StateError when no gradient has been accumulated.
  const NdArray<T>& grad() const;
  void zero_grad();

  /// Back-propagates from this scalar. The recorded graph is released afterwards, so a
  /// second call on the same result throws StateError.
  void backward();

  /// New leaf with a copy of the value and no history.
  Tensor detach() const;
  Tensor clone(bool requires_grad) const;

  // Op plumbing.
  static Tensor from_op(NdArray<T> value, std::vector<Tensor> inputs,
                        std::function<void(detail::Node<T>&)> backward_fn);
  detail::Node<T>* node() const noexcept { return node_.get(); }
  const std::shared_ptr<detail::Node<T>>& node_ptr() const noexcept { return node_; }

 private:
  std::shared_ptr<detail::Node<T>> node_;
};

}  // namespace genefx
