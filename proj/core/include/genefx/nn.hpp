// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "genefx/ops.hpp"
#include "genefx/tensor.hpp"

namespace genefx {

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

template <typename T>
using ParamList = std::vector<NamedTensor<T>>;

/// A resettable unit: the parameters that are redrawn together, and the fan-in used to
/// draw them.
struct LayerInfo {
  std::string id;
  std::vector<std::string> params;
  std::size_t fan_in = 1;
};

/// Square, stride-1, "same"-padded convolution geometry.
struct ConvSpec {
  std::size_t c_in = 1;
  std::size_t c_out = 1;
  std::size_t k = 3;

  std::size_t padding() const noexcept { return (k - 1) / 2; }
  std::size_t fan_in() const noexcept { return c_in * k * k; }
  /// Number of scalar kernel entries, c_out·c_in·k².
  std::size_t numel() const noexcept { return c_out * c_in * k * k; }
  Shape weight_shape() const { return {c_out, c_in, k, k}; }
  /// Throws ConfigError unless k is odd and both channel counts are positive.
  void validate() const;
};

/// Cross-correlation with zero "same" padding; x[B×Ci×H×W], w[Co×Ci×k×k] -> [B×Co×H×W].
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w);

/// Like conv2d but image n uses its own kernel w[n]; w is [B×Co×Ci×k×k].
template <typename T>
Tensor<T> conv2d_per_sample(const Tensor<T>& x, const Tensor<T>& w);

/// 2×2 mean pooling; H and W must be even.
template <typename T>
Tensor<T> avg_pool2(const Tensor<T>& x);

/// Nearest-neighbour 2× upsampling.
template <typename T>
Tensor<T> upsample_nearest2(const Tensor<T>& x);

/// Per-channel spatial mean, [B×C×H×W] -> [B×C].
template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x);

/// Kaiming-uniform draw, U(-sqrt(6/fan_in), +sqrt(6/fan_in)), deterministic per seed.
template <typename T>
NdArray<T> kaiming_uniform(const Shape& shape, std::size_t fan_in, std::uint64_t seed);

/// Kaiming-uniform convolution weights for a spec.
template <typename T>
Tensor<T> init_params(const ConvSpec& spec, std::uint64_t seed);

template <typename T>
struct Conv2d {
  ConvSpec spec;
  Tensor<T> weight;
  Tensor<T> bias;  // undefined when the layer has no bias

  Conv2d() = default;
  Conv2d(ConvSpec s, bool with_bias, std::uint64_t seed);

  Tensor<T> forward(const Tensor<T>& x) const;
  void collect(const std::string& prefix, ParamList<T>& out) const;
  LayerInfo layer(const std::string& prefix) const;
};

/// Two dense layers with ReLU in between and identity after the second.
/// w1 is [in×hidden], w2 is [hidden×out]; rows are applied as x·w + b.
template <typename T>
struct Mlp2 {
  Tensor<T> w1, b1, w2, b2;

  Mlp2() = default;
  Mlp2(std::size_t in, std::size_t hidden, std::size_t out, std::uint64_t seed);

  std::size_t in_dim() const { return w1.dim(0); }
  std::size_t hidden_dim() const { return w1.dim(1); }
  std::size_t out_dim() const { return w2.dim(1); }

  /// x[R×in] -> [R×out].
  Tensor<T> forward(const Tensor<T>& x) const;
  void collect(const std::string& prefix, ParamList<T>& out) const;
};

template <typename T>
struct AttentionResult {
  Tensor<T> out;      // [B×C×H×W], output projection of the attended values
  Tensor<T> qkv;      // [B×3C×H×W], channel concat of Q, K, V
  Tensor<T> weights;  // [B×HW×HW], row-stochastic attention matrix
};

/// Single-head dense self-attention over flattened spatial positions, with 1×1 Q/K/V/output
/// projections.
template <typename T>
struct AttentionBlock {
  static constexpr std::size_t kMaxPositions = 32 * 32;

  Conv2d<T> q, k, v, o;

  AttentionBlock() = default;
  AttentionBlock(std::size_t channels, std::uint64_t seed);

  std::size_t channels() const { return q.spec.c_in; }
  AttentionResult<T> forward(const Tensor<T>& x) const;
  void collect(const std::string& prefix, ParamList<T>& out) const;
  void collect_layers(const std::string& prefix, std::vector<LayerInfo>& out) const;
};

}  // namespace genefx
