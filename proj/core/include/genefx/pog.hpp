// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "genefx/nn.hpp"

// Orthogonal-basis parameter generation.
//
// Every scalar kernel entry i owns a learned embedding e_i of width D_e. The embedding is
// normalized to n_i and turned into the Householder reflector b_i = I - 2 n_i n_iᵀ, whose
// columns are an orthonormal basis of R^D_e. An input feature map is pooled and mapped by a
// 2-layer MLP plus softmax to mixing weights w (one vector per image); the specific embedding
// s_i = b_i w mixes the basis columns, and a shared 2-layer MLP decodes each s_i into the
// kernel entry. Entries are reshaped row-major into a [C_out×C_in×k×k] kernel.
namespace genefx::pog {

/// Rows with a 2-norm at or below this are rejected rather than normalized.
inline constexpr double kDegenerateNorm = 1e-8;
/// Accepted deviation from unit norm for a Householder input.
inline constexpr double kUnitNormTolerance = 1e-6;

enum class BasisMode {
  kMaterialized,  // build every b_i, then s_i = b_i·w
  kLazy,          // s_i = w - 2 n_i (n_iᵀ w), never forming b_i
};

/// E[N×D_e] -> unit-norm rows. Throws NumericError on a row with norm <= kDegenerateNorm.
template <typename T>
Tensor<T> normalize_embeddings(const Tensor<T>& embeddings);

/// I - 2 n nᵀ for one unit vector. Throws ContractError when n is not unit-norm.
template <typename T>
NdArray<T> householder_basis(std::span<const T> n);

/// Row-wise Householder reflectors, N[N×D_e] -> B[N×D_e×D_e]. Differentiable.
template <typename T>
Tensor<T> householder_bases(const Tensor<T>& normalized);

/// softmax(mlp(global_avg_pool(f_in))), f_in[B×D_c×H×W] -> W[B×D_e].
template <typename T>
Tensor<T> compute_weights(const Tensor<T>& f_in, const Mlp2<T>& weight_mlp);

/// s_i = b_i·w. bases[N×D_e×D_e]; w is [D_e] (-> S[N×D_e]) or [B×D_e] (-> S[B×N×D_e]).
template <typename T>
Tensor<T> specific_embedding(const Tensor<T>& bases, const Tensor<T>& w);

/// Same result as specific_embedding(householder_bases(normalized), w) without the bases.
template <typename T>
Tensor<T> specific_embedding_lazy(const Tensor<T>& normalized, const Tensor<T>& w);

/// Applies decode_mlp (D_e -> 1) to every row and reshapes to the kernel. S[N×D_e] gives
/// [C_out×C_in×k×k]; S[B×N×D_e] gives [B×C_out×C_in×k×k].
template <typename T>
Tensor<T> decode_parameters(const Tensor<T>& specific, const Mlp2<T>& decode_mlp,
                            const ConvSpec& spec);

struct PogConfig {
  ConvSpec conv;
  std::size_t cond_channels = 1;  // channel width of the conditioning feature
  std::size_t embed_dim = 64;
  std::size_t hidden = 0;  // MLP hidden width; 0 means embed_dim
  BasisMode basis_mode = BasisMode::kMaterialized;

  std::size_t hidden_dim() const noexcept { return hidden ? hidden : embed_dim; }
  void validate() const;
};

template <typename T>
class PogGenerator {
 public:
  PogGenerator() = default;
  PogGenerator(PogConfig config, std::uint64_t seed);

  const PogConfig& config() const noexcept { return config_; }
  /// N = c_out·c_in·k².
  std::size_t num_entries() const noexcept { return config_.conv.numel(); }

  /// Per-image kernels [B×C_out×C_in×k×k] conditioned on f_in[B×D_c×H×W].
  Tensor<T> generate(const Tensor<T>& f_in) const;
  /// Kernels from externally supplied mixing weights w[B×D_e].
  Tensor<T> generate_from_weights(const Tensor<T>& w) const;
  Tensor<T> weights(const Tensor<T>& f_in) const;
  /// B[N×D_e×D_e]; the cached copy once frozen.
  Tensor<T> bases() const;

  bool training() const noexcept { return training_; }
  void set_training(bool on) noexcept { training_ = on; }
  /// Caches the bases and stops gradients into the embeddings. Requires eval mode.
  void freeze();
  bool frozen() const noexcept { return frozen_bases_.has_value(); }

  /// Zeroes the decode MLP's output layer so every generated entry is 0.
  void zero_output();

  Tensor<T>& embeddings() noexcept { return embeddings_; }
  const Tensor<T>& embeddings() const noexcept { return embeddings_; }
  Mlp2<T>& weight_mlp() noexcept { return weight_mlp_; }
  const Mlp2<T>& weight_mlp() const noexcept { return weight_mlp_; }
  Mlp2<T>& decode_mlp() noexcept { return decode_mlp_; }
  const Mlp2<T>& decode_mlp() const noexcept { return decode_mlp_; }

  void collect(const std::string& prefix, ParamList<T>& out) const;
  std::size_t parameter_count() const;

 private:
  Tensor<T> specific(const Tensor<T>& w) const;
  /// Rescales the decode MLP at one-hot mixing weights, the largest specific-embedding norm on
  /// the simplex: unit-RMS hidden pre-activations, and generated kernels with the
  /// root-mean-square of a Kaiming draw of the same shape.
  void calibrate_output();

  PogConfig config_;
  Tensor<T> embeddings_;
  Mlp2<T> weight_mlp_;
  Mlp2<T> decode_mlp_;
  std::optional<Tensor<T>> frozen_bases_;
  bool training_ = true;
};

}  // namespace genefx::pog
