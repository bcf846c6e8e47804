// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/pde.hpp"

#include "genefx/rng.hpp"

namespace genefx {

std::string to_string(KernelSource source) {
  switch (source) {
    case KernelSource::kStatic:
      return "static";
    case KernelSource::kCandidateMixture:
      return "dynconv";
    case KernelSource::kPog:
      return "pog";
  }
  return "?";
}

std::string to_string(InsertionMode mode) {
  return mode == InsertionMode::kFeature ? "feature" : "qkv";
}

KernelSource parse_kernel_source(const std::string& text) {
  if (text == "static") return KernelSource::kStatic;
  if (text == "dynconv") return KernelSource::kCandidateMixture;
  if (text == "pog") return KernelSource::kPog;
  throw ConfigError("unknown kernel source '" + text + "' (expected static, dynconv or pog)");
}

InsertionMode parse_insertion_mode(const std::string& text) {
  if (text == "feature") return InsertionMode::kFeature;
  if (text == "qkv") return InsertionMode::kQkvConcat;
  throw ConfigError("unknown insertion mode '" + text + "' (expected feature or qkv)");
}

template <typename T>
PdeBlock<T>::PdeBlock(std::size_t d_c, PdeConfig config, std::uint64_t seed)
    : d_c_(d_c), config_(config) {
  if (config_.d_m == 0 || config_.d_m >= d_c_) {
    throw ConfigError("PdeBlock: bottleneck width D_m=" + std::to_string(config_.d_m) +
                      " must satisfy 0 < D_m < D_c=" + std::to_string(d_c_));
  }
  spec1_ = ConvSpec{d_c_, config_.d_m, config_.d_k};
  spec2_ = ConvSpec{config_.d_m, d_c_, config_.d_k};
  spec1_.validate();
  spec2_.validate();
  switch (config_.source) {
    case KernelSource::kStatic:
      static1_ = init_params<T>(spec1_, derive_seed(seed, "static1"));
      static2_ = init_params<T>(spec2_, derive_seed(seed, "static2"));
      break;
    case KernelSource::kCandidateMixture: {
      if (config_.candidates == 0) throw ConfigError("PdeBlock: need at least one candidate");
      const std::size_t k = config_.candidates;
      mix1_.candidates = Tensor<T>(
          kaiming_uniform<T>({k, spec1_.numel()}, spec1_.fan_in(), derive_seed(seed, "cand1")),
          true);
      mix2_.candidates = Tensor<T>(
          kaiming_uniform<T>({k, spec2_.numel()}, spec2_.fan_in(), derive_seed(seed, "cand2")),
          true);
      mix1_.mix_mlp = Mlp2<T>(d_c_, config_.d_e, k, derive_seed(seed, "mix1"));
      mix2_.mix_mlp = Mlp2<T>(d_c_, config_.d_e, k, derive_seed(seed, "mix2"));
      break;
    }
    case KernelSource::kPog: {
      pog::PogConfig p1{spec1_, d_c_, config_.d_e, 0, config_.basis_mode};
      pog::PogConfig p2{spec2_, d_c_, config_.d_e, 0, config_.basis_mode};
      gen1_ = pog::PogGenerator<T>(p1, derive_seed(seed, "gen1"));
      gen2_ = pog::PogGenerator<T>(p2, derive_seed(seed, "gen2"));
      break;
    }
  }
}

template <typename T>
Tensor<T> PdeBlock<T>::kernel(int which, const Tensor<T>& f_in) const {
  const ConvSpec& spec = which == 1 ? spec1_ : spec2_;
  switch (config_.source) {
    case KernelSource::kStatic:
      return which == 1 ? static1_ : static2_;
    case KernelSource::kCandidateMixture: {
      const Mixture& m = which == 1 ? mix1_ : mix2_;
      auto alpha = softmax_rows(m.mix_mlp.forward(global_avg_pool(f_in)));
      Shape shape = spec.weight_shape();
      shape.insert(shape.begin(), f_in.dim(0));
      return reshape(matmul(alpha, m.candidates), shape);
    }
    case KernelSource::kPog:
      return (which == 1 ? gen1_ : gen2_).generate(f_in);
  }
  throw ConfigError("PdeBlock: unknown kernel source");
}

template <typename T>
Tensor<T> PdeBlock<T>::apply(const Tensor<T>& x, const Tensor<T>& w) const {
  return w.value().rank() == 5 ? conv2d_per_sample(x, w) : conv2d(x, w);
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> PdeBlock<T>::kernels(const Tensor<T>& f_in) const {
  return {kernel(1, f_in), kernel(2, f_in)};
}

template <typename T>
Tensor<T> PdeBlock<T>::delta(const Tensor<T>& f_in) const {
  if (f_in.value().rank() != 4 || f_in.dim(1) != d_c_) {
    throw DimensionError("PdeBlock: input " + shape_str(f_in.shape()) + " but block expects " +
                         std::to_string(d_c_) + " channels");
  }
  auto [p1, p2] = kernels(f_in);
  return apply(apply(f_in, p1), p2);
}

template <typename T>
Tensor<T> PdeBlock<T>::forward(const Tensor<T>& f_in) const {
  return add(f_in, delta(f_in));
}

template <typename T>
void PdeBlock<T>::zero_output() {
  switch (config_.source) {
    case KernelSource::kStatic:
      static2_.mutable_value().fill(T{0});
      break;
    case KernelSource::kCandidateMixture:
      mix2_.candidates.mutable_value().fill(T{0});
      break;
    case KernelSource::kPog:
      gen2_.zero_output();
      break;
  }
}

template <typename T>
void PdeBlock<T>::set_training(bool on) {
  if (config_.source == KernelSource::kPog) {
    gen1_.set_training(on);
    gen2_.set_training(on);
  }
}

template <typename T>
void PdeBlock<T>::freeze() {
  if (config_.source == KernelSource::kPog) {
    gen1_.freeze();
    gen2_.freeze();
  }
}

template <typename T>
void PdeBlock<T>::collect(const std::string& prefix, ParamList<T>& out) const {
  switch (config_.source) {
    case KernelSource::kStatic:
      out.push_back({prefix + ".conv1.weight", static1_});
      out.push_back({prefix + ".conv2.weight", static2_});
      break;
    case KernelSource::kCandidateMixture:
      out.push_back({prefix + ".dyn1.candidates", mix1_.candidates});
      mix1_.mix_mlp.collect(prefix + ".dyn1.mix_mlp", out);
      out.push_back({prefix + ".dyn2.candidates", mix2_.candidates});
      mix2_.mix_mlp.collect(prefix + ".dyn2.mix_mlp", out);
      break;
    case KernelSource::kPog:
      gen1_.collect(prefix + ".gen1", out);
      gen2_.collect(prefix + ".gen2", out);
      break;
  }
}

template <typename T>
std::size_t PdeBlock<T>::parameter_count() const {
  ParamList<T> params;
  collect("", params);
  std::size_t total = 0;
  for (const auto& p : params) total += p.tensor.size();
  return total;
}

template class PdeBlock<float>;
template class PdeBlock<double>;

}  // namespace genefx
