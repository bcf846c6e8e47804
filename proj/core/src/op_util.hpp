// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "genefx/tensor.hpp"

namespace genefx::detail {

// Gradient buffer of a parent, or nullptr when it does not take gradients.
template <typename T>
NdArray<T>* grad_of(Node<T>& parent) {
  return parent.requires_grad ? &parent.grad_buffer() : nullptr;
}

}  // namespace genefx::detail
