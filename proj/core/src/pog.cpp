// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/pog.hpp"

#include <cmath>

#include "genefx/rng.hpp"
#include "op_util.hpp"

namespace genefx::pog {

using detail::grad_of;
using detail::Node;

template <typename T>
Tensor<T> normalize_embeddings(const Tensor<T>& embeddings) {
  const auto& ev = embeddings.value();
  if (ev.rank() != 2) throw DimensionError("normalize_embeddings: expects [N×D_e]");
  const std::size_t rows = ev.dim(0), d = ev.dim(1);
  NdArray<T> out(ev.shape());
  std::vector<T> norms(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const T* e = ev.data().data() + i * d;
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += static_cast<double>(e[j]) * e[j];
    const double norm = std::sqrt(sq);
    if (!(norm > kDegenerateNorm)) {
      throw NumericError("normalize_embeddings: row " + std::to_string(i) +
                         " is degenerate (norm " + std::to_string(norm) +
                         "); re-initialize the embedding");
    }
    norms[i] = static_cast<T>(norm);
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = static_cast<T>(e[j] / norm);
  }
  auto y = out;
  return Tensor<T>::from_op(
      std::move(out), {embeddings},
      [y = std::move(y), norms = std::move(norms), rows, d](Node<T>& self) {
        if (auto* ge = grad_of(*self.parents[0])) {
          // d(e/|e|) = (g - y (y·g)) / |e|
          for (std::size_t i = 0; i < rows; ++i) {
            const T* g = self.grad->data().data() + i * d;
            const T* yi = y.data().data() + i * d;
            T dot{0};
            for (std::size_t j = 0; j < d; ++j) dot += yi[j] * g[j];
            for (std::size_t j = 0; j < d; ++j) (*ge)[i * d + j] += (g[j] - yi[j] * dot) / norms[i];
          }
        }
      });
}

template <typename T>
NdArray<T> householder_basis(std::span<const T> n) {
  const std::size_t d = n.size();
  if (d == 0) throw DimensionError("householder_basis: empty vector");
  double sq = 0.0;
  for (T v : n) sq += static_cast<double>(v) * v;
  if (std::abs(std::sqrt(sq) - 1.0) > kUnitNormTolerance) {
    throw ContractError("householder_basis: input norm " + std::to_string(std::sqrt(sq)) +
                        " is not 1");
  }
  NdArray<T> b({d, d});
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      b[r * d + c] = (r == c ? T{1} : T{0}) - T{2} * n[r] * n[c];
    }
  }
  return b;
}

template <typename T>
Tensor<T> householder_bases(const Tensor<T>& normalized) {
  const auto& nv = normalized.value();
  if (nv.rank() != 2) throw DimensionError("householder_bases: expects [N×D_e]");
  const std::size_t rows = nv.dim(0), d = nv.dim(1);
  NdArray<T> out({rows, d, d});
  for (std::size_t i = 0; i < rows; ++i) {
    const T* n = nv.data().data() + i * d;
    T* b = out.data().data() + i * d * d;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) b[r * d + c] = (r == c ? T{1} : T{0}) - T{2} * n[r] * n[c];
    }
  }
  return Tensor<T>::from_op(std::move(out), {normalized}, [rows, d](Node<T>& self) {
    auto& p = *self.parents[0];
    if (auto* gn = grad_of(p)) {
      // dn = -2 (G + Gᵀ) n
      for (std::size_t i = 0; i < rows; ++i) {
        const T* g = self.grad->data().data() + i * d * d;
        const T* n = p.value.data().data() + i * d;
        T* out_g = gn->data().data() + i * d;
        for (std::size_t r = 0; r < d; ++r) {
          T acc{0};
          for (std::size_t c = 0; c < d; ++c) acc += (g[r * d + c] + g[c * d + r]) * n[c];
          out_g[r] += T{-2} * acc;
        }
      }
    }
  });
}

template <typename T>
Tensor<T> compute_weights(const Tensor<T>& f_in, const Mlp2<T>& weight_mlp) {
  if (f_in.value().rank() != 4 || f_in.dim(1) != weight_mlp.in_dim()) {
    throw DimensionError("compute_weights: feature " + shape_str(f_in.shape()) +
                         " does not match MLP input width " + std::to_string(weight_mlp.in_dim()));
  }
  return softmax_rows(weight_mlp.forward(global_avg_pool(f_in)));
}

namespace {

// Views w as [B×D_e] and remembers whether the caller passed a single vector.
template <typename T>
std::pair<Tensor<T>, bool> as_batch(const Tensor<T>& w) {
  if (w.value().rank() == 1) return {reshape(w, {1, w.dim(0)}), true};
  if (w.value().rank() == 2) return {w, false};
  throw DimensionError("mixing weights must be [D_e] or [B×D_e], got " + shape_str(w.shape()));
}

}  // namespace

template <typename T>
Tensor<T> specific_embedding(const Tensor<T>& bases, const Tensor<T>& w) {
  const auto& bv = bases.value();
  auto [wb, single] = as_batch(w);
  if (bv.rank() != 3 || bv.dim(1) != bv.dim(2) || wb.dim(1) != bv.dim(1)) {
    throw DimensionError("specific_embedding: bases " + shape_str(bv.shape()) + ", weights " +
                         shape_str(w.shape()));
  }
  const std::size_t rows = bv.dim(0), d = bv.dim(1), batch = wb.dim(0);
  NdArray<T> out({batch, rows, d});
  const auto& wv = wb.value();
  for (std::size_t s = 0; s < batch; ++s) {
    const T* ws = wv.data().data() + s * d;
    for (std::size_t i = 0; i < rows; ++i) {
      const T* b = bv.data().data() + i * d * d;
      T* o = out.data().data() + (s * rows + i) * d;
      for (std::size_t r = 0; r < d; ++r) {
        T acc{0};
        for (std::size_t c = 0; c < d; ++c) acc += b[r * d + c] * ws[c];
        o[r] = acc;
      }
    }
  }
  auto result = Tensor<T>::from_op(std::move(out), {bases, wb}, [rows, d, batch](Node<T>& self) {
    auto& pb = *self.parents[0];
    auto& pw = *self.parents[1];
    auto* gb = grad_of(pb);
    auto* gw = grad_of(pw);
    for (std::size_t s = 0; s < batch; ++s) {
      const T* ws = pw.value.data().data() + s * d;
      for (std::size_t i = 0; i < rows; ++i) {
        const T* g = self.grad->data().data() + (s * rows + i) * d;
        const T* b = pb.value.data().data() + i * d * d;
        if (gb) {
          T* db = gb->data().data() + i * d * d;
          for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) db[r * d + c] += g[r] * ws[c];
        }
        if (gw) {
          T* dw = gw->data().data() + s * d;
          for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) dw[c] += b[r * d + c] * g[r];
        }
      }
    }
  });
  return single ? reshape(result, {rows, d}) : result;
}

template <typename T>
Tensor<T> specific_embedding_lazy(const Tensor<T>& normalized, const Tensor<T>& w) {
  const auto& nv = normalized.value();
  auto [wb, single] = as_batch(w);
  if (nv.rank() != 2 || wb.dim(1) != nv.dim(1)) {
    throw DimensionError("specific_embedding_lazy: embeddings " + shape_str(nv.shape()) +
                         ", weights " + shape_str(w.shape()));
  }
  const std::size_t rows = nv.dim(0), d = nv.dim(1), batch = wb.dim(0);
  NdArray<T> out({batch, rows, d});
  const auto& wv = wb.value();
  for (std::size_t s = 0; s < batch; ++s) {
    const T* ws = wv.data().data() + s * d;
    for (std::size_t i = 0; i < rows; ++i) {
      const T* n = nv.data().data() + i * d;
      T dot{0};
      for (std::size_t c = 0; c < d; ++c) dot += n[c] * ws[c];
      T* o = out.data().data() + (s * rows + i) * d;
      for (std::size_t r = 0; r < d; ++r) o[r] = ws[r] - T{2} * n[r] * dot;
    }
  }
  auto result =
      Tensor<T>::from_op(std::move(out), {normalized, wb}, [rows, d, batch](Node<T>& self) {
        auto& pn = *self.parents[0];
        auto& pw = *self.parents[1];
        auto* gn = grad_of(pn);
        auto* gw = grad_of(pw);
        for (std::size_t s = 0; s < batch; ++s) {
          const T* ws = pw.value.data().data() + s * d;
          for (std::size_t i = 0; i < rows; ++i) {
            const T* g = self.grad->data().data() + (s * rows + i) * d;
            const T* n = pn.value.data().data() + i * d;
            T nw{0}, ng{0};
            for (std::size_t c = 0; c < d; ++c) {
              nw += n[c] * ws[c];
              ng += n[c] * g[c];
            }
            if (gw) {
              T* dw = gw->data().data() + s * d;
              for (std::size_t c = 0; c < d; ++c) dw[c] += g[c] - T{2} * n[c] * ng;
            }
            if (gn) {
              T* dn = gn->data().data() + i * d;
              for (std::size_t c = 0; c < d; ++c) dn[c] += T{-2} * (nw * g[c] + ng * ws[c]);
            }
          }
        }
      });
  return single ? reshape(result, {rows, d}) : result;
}

template <typename T>
Tensor<T> decode_parameters(const Tensor<T>& specific, const Mlp2<T>& decode_mlp,
                            const ConvSpec& spec) {
  const auto& sv = specific.value();
  const bool batched = sv.rank() == 3;
  if (sv.rank() != 2 && !batched) {
    throw DimensionError("decode_parameters: expects [N×D_e] or [B×N×D_e]");
  }
  const std::size_t rows = sv.dim(batched ? 1 : 0), d = sv.dim(sv.rank() - 1);
  const std::size_t batch = batched ? sv.dim(0) : 1;
  if (rows != spec.numel()) {
    throw DimensionError("decode_parameters: " + std::to_string(rows) +
                         " embeddings for a kernel of " + std::to_string(spec.numel()) +
                         " entries " + shape_str(spec.weight_shape()));
  }
  if (decode_mlp.out_dim() != 1) throw DimensionError("decode_parameters: decode MLP must emit 1");
  auto flat = decode_mlp.forward(reshape(specific, {batch * rows, d}));
  Shape shape = spec.weight_shape();
  if (batched) shape.insert(shape.begin(), batch);
  return reshape(flat, shape);
}

void PogConfig::validate() const {
  conv.validate();
  if (embed_dim < 2) throw ConfigError("PogConfig: embedding dimension must be at least 2");
  if (cond_channels == 0) throw ConfigError("PogConfig: conditioning channels must be positive");
}

template <typename T>
PogGenerator<T>::PogGenerator(PogConfig config, std::uint64_t seed) : config_(config) {
  config_.validate();
  const std::size_t n = num_entries(), d = config_.embed_dim, h = config_.hidden_dim();
  Rng rng(derive_seed(seed, "embed"));
  std::normal_distribution<T> normal(T{0}, T{1});
  NdArray<T> e({n, d});
  for (auto& v : e.data()) v = normal(rng);
  embeddings_ = Tensor<T>(std::move(e), true);
  weight_mlp_ = Mlp2<T>(config_.cond_channels, h, d, derive_seed(seed, "weight_mlp"));
  decode_mlp_ = Mlp2<T>(d, h, 1, derive_seed(seed, "decode_mlp"));
  calibrate_output();
}

template <typename T>
void PogGenerator<T>::calibrate_output() {
  NoGradGuard guard;
  const std::size_t d = config_.embed_dim;
  NdArray<T> one_hot({1, d}, T{0});
  one_hot[0] = T{1};
  const Tensor<T> peaked(std::move(one_hot));
  auto rms = [](const NdArray<T>& a) {
    double sq = 0.0;
    for (auto v : a.data()) sq += static_cast<double>(v) * v;
    return std::sqrt(sq / static_cast<double>(a.size()));
  };
  auto rescale = [](Tensor<T>& t, double gain) {
    for (auto& v : t.mutable_value().data()) v = static_cast<T>(v * gain);
  };
  const Tensor<T> s = reshape(specific(peaked), {num_entries(), d});
  const double hidden = rms(matmul(s, decode_mlp_.w1).value());
  if (hidden > 0.0 && std::isfinite(hidden)) rescale(decode_mlp_.w1, 1.0 / hidden);
  const double out = rms(generate_from_weights(peaked).value());
  if (out > 0.0 && std::isfinite(out))
    rescale(decode_mlp_.w2, std::sqrt(2.0 / static_cast<double>(config_.conv.fan_in())) / out);
}

template <typename T>
Tensor<T> PogGenerator<T>::bases() const {
  if (frozen_bases_) return *frozen_bases_;
  return householder_bases(normalize_embeddings(embeddings_));
}

template <typename T>
Tensor<T> PogGenerator<T>::weights(const Tensor<T>& f_in) const {
  return compute_weights(f_in, weight_mlp_);
}

template <typename T>
Tensor<T> PogGenerator<T>::specific(const Tensor<T>& w) const {
  if (frozen_bases_ || config_.basis_mode == BasisMode::kMaterialized) {
    return specific_embedding(bases(), w);
  }
  return specific_embedding_lazy(normalize_embeddings(embeddings_), w);
}

template <typename T>
Tensor<T> PogGenerator<T>::generate_from_weights(const Tensor<T>& w) const {
  if (w.value().rank() != 2 || w.dim(1) != config_.embed_dim) {
    throw DimensionError("generate: mixing weights " + shape_str(w.shape()) + " for D_e=" +
                         std::to_string(config_.embed_dim));
  }
  return decode_parameters(specific(w), decode_mlp_, config_.conv);
}

template <typename T>
Tensor<T> PogGenerator<T>::generate(const Tensor<T>& f_in) const {
  return generate_from_weights(weights(f_in));
}

template <typename T>
void PogGenerator<T>::freeze() {
  if (training_) throw StateError("PogGenerator::freeze: generator is still in training mode");
  {
    NoGradGuard guard;
    frozen_bases_ = householder_bases(normalize_embeddings(embeddings_)).detach();
  }
  embeddings_.set_requires_grad(false);
}

template <typename T>
void PogGenerator<T>::zero_output() {
  decode_mlp_.w2.mutable_value().fill(T{0});
  decode_mlp_.b2.mutable_value().fill(T{0});
}

template <typename T>
void PogGenerator<T>::collect(const std::string& prefix, ParamList<T>& out) const {
  out.push_back({prefix + ".embed", embeddings_});
  weight_mlp_.collect(prefix + ".weight_mlp", out);
  decode_mlp_.collect(prefix + ".decode_mlp", out);
}

template <typename T>
std::size_t PogGenerator<T>::parameter_count() const {
  ParamList<T> params;
  collect("", params);
  std::size_t total = 0;
  for (const auto& p : params) total += p.tensor.size();
  return total;
}

#define GENEFX_INSTANTIATE_POG(T)                                                         \
  template Tensor<T> normalize_embeddings(const Tensor<T>&);                              \
  template NdArray<T> householder_basis(std::span<const T>);                              \
  template Tensor<T> householder_bases(const Tensor<T>&);                                 \
  template Tensor<T> compute_weights(const Tensor<T>&, const Mlp2<T>&);                   \
  template Tensor<T> specific_embedding(const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> specific_embedding_lazy(const Tensor<T>&, const Tensor<T>&);         \
  template Tensor<T> decode_parameters(const Tensor<T>&, const Mlp2<T>&, const ConvSpec&); \
  template class PogGenerator<T>;

GENEFX_INSTANTIATE_POG(float)
GENEFX_INSTANTIATE_POG(double)

}  // namespace genefx::pog
