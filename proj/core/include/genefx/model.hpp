// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genefx/nn.hpp"
#include "genefx/pde.hpp"

namespace genefx {

struct ToyModelConfig {
  std::size_t channels = 8;  // C; the bottleneck runs at 2C
  bool attention = true;
  std::optional<PdeConfig> pde;
};

/// Small encoder-decoder:
///   e1 = relu(enc1(x))                         [C]   full resolution
///   e2 = relu(enc2(avg_pool2(e1)))             [2C]  half resolution
///   a  = e2 + attn(e2)                         (decoder attention)
///   a  = pde(a)                 feature mode   or  a + proj(pde.delta(qkv))  in qkv mode
///   d  = relu(dec.conv1(a)) upsampled + e1     [C]
///   y  = x + dec.conv2(d)                      [3]
/// dec.conv2 starts at zero, so a fresh model is the identity map. H and W must be even.
template <typename T>
class ToyModel {
 public:
  ToyModel() = default;
  ToyModel(ToyModelConfig config, std::uint64_t seed);

  const ToyModelConfig& config() const noexcept { return config_; }

  /// Differentiable forward, x[B×3×H×W] -> [B×3×H×W], unclamped.
  Tensor<T> forward(const Tensor<T>& x) const;
  /// Gradient-free forward clamped to [0,1]; accepts [3×H×W] or [B×3×H×W] and keeps the rank.
  NdArray<T> infer(const NdArray<T>& x) const;

  /// Every parameter with its registry name, in a fixed order.
  ParamList<T> parameters() const;
  /// Resettable layers (convolutions and attention projections), in a fixed order.
  std::vector<LayerInfo> layers() const;
  /// Throws LookupError for an unknown name.
  Tensor<T> param(const std::string& name) const;
  std::size_t parameter_count() const;

  /// Deep copy; parameter storage is not shared with the source.
  ToyModel clone() const;

  bool has_pde() const noexcept { return pde_.has_value(); }
  PdeBlock<T>& pde();
  const PdeBlock<T>& pde() const;

  bool training() const noexcept { return training_; }
  void set_training(bool on);
  /// Inference mode plus frozen POG bases.
  void freeze();
  bool frozen() const noexcept { return frozen_; }

  /// Multiply count of one forward pass on an H×W image (convolutions, attention matmuls and
  /// generator MLPs).
  std::size_t macs(std::size_t height, std::size_t width) const;

 private:
  ToyModelConfig config_;
  Conv2d<T> enc1_, enc2_, dec_conv1_, dec_conv2_, proj_;
  std::optional<AttentionBlock<T>> attn_;
  std::optional<PdeBlock<T>> pde_;
  bool training_ = true;
  bool frozen_ = false;
};

/// Copies every parameter of `from` into the same-named parameter of `to`. Throws LookupError
/// for a missing name and DimensionError (naming the tensor) on a shape mismatch.
template <typename T>
void copy_parameters(const ParamList<T>& from, const ParamList<T>& to);

/// Base model with an identity-initialized block after the decoder attention. Base weights
/// are copied. Throws ConfigError when the base has no attention block or already has one.
template <typename T>
ToyModel<T> insert_pde(const ToyModel<T>& base, const PdeConfig& pde, std::uint64_t seed);

/// Glob match with `*` and `?`, as used for probe-layer selection.
bool glob_match(const std::string& pattern, const std::string& text);

/// Layers whose id matches any comma-separated glob in `patterns`, in model order. An empty
/// pattern string selects nothing.
std::vector<LayerInfo> select_layers(const std::vector<LayerInfo>& layers,
                                     const std::string& patterns);

/// The probe set used when none is given: every decoder layer.
inline constexpr const char* kDefaultProbe = "dec.*";

}  // namespace genefx
