// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "genefx/tensor.hpp"

// Differentiable primitives. Every op records a backward rule when any input requires grad
// and grad recording is enabled on the calling thread.
namespace genefx {

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
/// Elementwise (Hadamard) product.
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s);
template <typename T>
Tensor<T> relu(const Tensor<T>& a);
/// |a|, with subgradient 0 at 0.
template <typename T>
Tensor<T> abs(const Tensor<T>& a);
template <typename T>
Tensor<T> square(const Tensor<T>& a);

// Reductions accumulate in double and return a [1] tensor.
template <typename T>
Tensor<T> sum(const Tensor<T>& a);
template <typename T>
Tensor<T> mean(const Tensor<T>& a);
/// mean(a ⊙ w) for a constant weight array; the smooth probe loss used by gradient checks.
template <typename T>
Tensor<T> weighted_sum(const Tensor<T>& a, const NdArray<T>& w);

/// [M×K]·[K×N] -> [M×N].
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
/// Batched [B×M×K]·[B×K×N] -> [B×M×N].
template <typename T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b);
/// Swaps the two trailing axes.
template <typename T>
Tensor<T> transpose_last2(const Tensor<T>& a);

/// Adds b[N] to every row of a[...×N].
template <typename T>
Tensor<T> add_row_bias(const Tensor<T>& a, const Tensor<T>& b);
/// Adds b[C] across channel axis 1 of x[B×C×H×W].
template <typename T>
Tensor<T> add_channel_bias(const Tensor<T>& x, const Tensor<T>& b);

/// Softmax along the last axis (max-subtracted).
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& a);

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape);
/// Concatenates along axis 1 (channels).
template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& parts);

/// [B×C×H×W] -> [B×(H·W)×C].
template <typename T>
Tensor<T> nchw_to_tokens(const Tensor<T>& x);
/// [B×(H·W)×C] -> [B×C×H×W].
template <typename T>
Tensor<T> tokens_to_nchw(const Tensor<T>& t, std::size_t height, std::size_t width);

/// Plain (non-differentiable) softmax of a vector; used by tests and reports.
template <typename T>
std::vector<T> softmax(const std::vector<T>& v);

}  // namespace genefx
