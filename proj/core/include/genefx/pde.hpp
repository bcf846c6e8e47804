// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "genefx/nn.hpp"
#include "genefx/pog.hpp"

namespace genefx {

/// Where the bottleneck block gets its two kernels from.
enum class KernelSource {
  kStatic,            // learned, input-independent kernels
  kCandidateMixture,  // softmax mixture of K learned candidate kernels (dynamic convolution)
  kPog,               // orthogonal-basis generation
};

/// How the block is wired into a host after attention.
enum class InsertionMode {
  kFeature,    // block wraps the attention output
  kQkvConcat,  // block reads concat(Q, K, V); its residual branch is projected back by a 1×1 conv
};

std::string to_string(KernelSource source);
std::string to_string(InsertionMode mode);
KernelSource parse_kernel_source(const std::string& text);
InsertionMode parse_insertion_mode(const std::string& text);

struct PdeConfig {
  std::size_t d_m = 4;  // bottleneck width
  std::size_t d_k = 3;  // kernel size
  std::size_t d_e = 64;  // POG embedding width; also the mixing-MLP hidden width
  KernelSource source = KernelSource::kPog;
  std::size_t candidates = 4;  // K for kCandidateMixture
  InsertionMode mode = InsertionMode::kFeature;
  pog::BasisMode basis_mode = pog::BasisMode::kMaterialized;
};

/// Residual bottleneck f_out = f_in + P2 ⊛ (P1 ⊛ f_in) with P1[D_m×D_c×k×k] and
/// P2[D_c×D_m×k×k]. There is no nonlinearity between the two convolutions. Both kernels are
/// conditioned on f_in and regenerated per image for the dynamic sources.
template <typename T>
class PdeBlock {
 public:
  PdeBlock() = default;
  /// Throws ConfigError unless d_m < d_c.
  PdeBlock(std::size_t d_c, PdeConfig config, std::uint64_t seed);

  std::size_t d_c() const noexcept { return d_c_; }
  const PdeConfig& config() const noexcept { return config_; }

  Tensor<T> forward(const Tensor<T>& f_in) const;
  /// The residual branch alone, P2 ⊛ (P1 ⊛ f_in).
  Tensor<T> delta(const Tensor<T>& f_in) const;
  /// Kernels used for f_in: [B×D_m×D_c×k×k] and [B×D_c×D_m×k×k]. Static kernels come back
  /// unbatched, [D_m×D_c×k×k] and [D_c×D_m×k×k].
  std::pair<Tensor<T>, Tensor<T>> kernels(const Tensor<T>& f_in) const;

  /// Makes the second kernel identically zero, turning the block into the identity.
  void zero_output();
  void set_training(bool on);
  /// Freezes POG bases; no-op for other sources.
  void freeze();

  pog::PogGenerator<T>& gen1() { return gen1_; }
  pog::PogGenerator<T>& gen2() { return gen2_; }
  const pog::PogGenerator<T>& gen1() const { return gen1_; }
  const pog::PogGenerator<T>& gen2() const { return gen2_; }

  void collect(const std::string& prefix, ParamList<T>& out) const;
  std::size_t parameter_count() const;

 private:
  struct Mixture {
    Tensor<T> candidates;  // [K×numel]
    Mlp2<T> mix_mlp;       // D_c -> hidden -> K
  };

  Tensor<T> kernel(int which, const Tensor<T>& f_in) const;
  Tensor<T> apply(const Tensor<T>& x, const Tensor<T>& w) const;

  std::size_t d_c_ = 0;
  PdeConfig config_;
  ConvSpec spec1_, spec2_;
  // kStatic
  Tensor<T> static1_, static2_;
  // kCandidateMixture
  Mixture mix1_, mix2_;
  // kPog
  pog::PogGenerator<T> gen1_, gen2_;
};

}  // namespace genefx
