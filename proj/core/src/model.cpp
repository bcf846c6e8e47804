// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "genefx/rng.hpp"

namespace genefx {

namespace {

constexpr std::size_t kImageChannels = 3;

std::size_t conv_macs(const ConvSpec& s, std::size_t hw) { return hw * s.numel(); }

std::size_t mlp_macs(std::size_t in, std::size_t hidden, std::size_t out) {
  return in * hidden + hidden * out;
}

}  // namespace

template <typename T>
ToyModel<T>::ToyModel(ToyModelConfig config, std::uint64_t seed) : config_(config) {
  const std::size_t c = config_.channels;
  if (c == 0) throw ConfigError("ToyModel: channels must be positive");
  if (config_.pde && !config_.attention)
    throw ConfigError("ToyModel: the PDE block needs a decoder attention block to follow");
  enc1_ = Conv2d<T>({kImageChannels, c, 3}, true, derive_seed(seed, "enc.conv1"));
  enc2_ = Conv2d<T>({c, 2 * c, 3}, true, derive_seed(seed, "enc.conv2"));
  if (config_.attention) attn_.emplace(2 * c, derive_seed(seed, "dec.attn"));
  dec_conv1_ = Conv2d<T>({2 * c, c, 3}, true, derive_seed(seed, "dec.conv1"));
  dec_conv2_ = Conv2d<T>({c, kImageChannels, 3}, true, derive_seed(seed, "dec.conv2"));
  dec_conv2_.weight.mutable_value().fill(T{0});
  if (config_.pde) {
    const bool qkv = config_.pde->mode == InsertionMode::kQkvConcat;
    const std::size_t d_c = qkv ? 6 * c : 2 * c;
    pde_.emplace(d_c, *config_.pde, derive_seed(seed, "pde"));
    if (qkv) proj_ = Conv2d<T>({6 * c, 2 * c, 1}, true, derive_seed(seed, "pde.proj"));
  }
}

template <typename T>
Tensor<T> ToyModel<T>::forward(const Tensor<T>& x) const {
  const auto& xv = x.value();
  if (xv.rank() != 4 || xv.dim(1) != kImageChannels) {
    throw DimensionError("ToyModel: expects [B×3×H×W], got " + shape_str(xv.shape()));
  }
  auto e1 = relu(enc1_.forward(x));
  auto a = relu(enc2_.forward(avg_pool2(e1)));
  if (attn_) {
    auto r = attn_->forward(a);
    a = add(a, r.out);
    if (pde_) {
      a = pde_->config().mode == InsertionMode::kFeature
              ? pde_->forward(a)
              : add(a, proj_.forward(pde_->delta(r.qkv)));
    }
  }
  auto d = add(upsample_nearest2(relu(dec_conv1_.forward(a))), e1);
  return add(x, dec_conv2_.forward(d));
}

template <typename T>
NdArray<T> ToyModel<T>::infer(const NdArray<T>& x) const {
  const bool single = x.rank() == 3;
  NdArray<T> batch = single ? x.reshaped({1, x.dim(0), x.dim(1), x.dim(2)}) : x;
  NoGradGuard guard;
  NdArray<T> y = forward(Tensor<T>(std::move(batch))).value();
  for (auto& v : y.data()) v = std::clamp(v, T{0}, T{1});
  return single ? y.reshaped(x.shape()) : y;
}

template <typename T>
ParamList<T> ToyModel<T>::parameters() const {
  ParamList<T> out;
  enc1_.collect("enc.conv1", out);
  enc2_.collect("enc.conv2", out);
  if (attn_) attn_->collect("dec.attn", out);
  dec_conv1_.collect("dec.conv1", out);
  dec_conv2_.collect("dec.conv2", out);
  if (pde_) {
    pde_->collect("pde", out);
    if (pde_->config().mode == InsertionMode::kQkvConcat) proj_.collect("pde.proj", out);
  }
  return out;
}

template <typename T>
std::vector<LayerInfo> ToyModel<T>::layers() const {
  std::vector<LayerInfo> out;
  out.push_back(enc1_.layer("enc.conv1"));
  out.push_back(enc2_.layer("enc.conv2"));
  if (attn_) attn_->collect_layers("dec.attn", out);
  out.push_back(dec_conv1_.layer("dec.conv1"));
  out.push_back(dec_conv2_.layer("dec.conv2"));
  if (pde_ && pde_->config().mode == InsertionMode::kQkvConcat)
    out.push_back(proj_.layer("pde.proj"));
  return out;
}

template <typename T>
Tensor<T> ToyModel<T>::param(const std::string& name) const {
  for (auto& p : parameters())
    if (p.name == name) return p.tensor;
  throw LookupError("ToyModel: no parameter named '" + name + "'");
}

template <typename T>
std::size_t ToyModel<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.size();
  return n;
}

template <typename T>
ToyModel<T> ToyModel<T>::clone() const {
  ToyModel copy(config_, 0);
  const auto src = parameters();
  auto dst = copy.parameters();
  copy_parameters(src, dst);
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i].tensor.set_requires_grad(src[i].tensor.requires_grad());
  copy.set_training(training_);
  if (frozen_) copy.freeze();
  return copy;
}

template <typename T>
PdeBlock<T>& ToyModel<T>::pde() {
  if (!pde_) throw StateError("ToyModel: no PDE block");
  return *pde_;
}

template <typename T>
const PdeBlock<T>& ToyModel<T>::pde() const {
  if (!pde_) throw StateError("ToyModel: no PDE block");
  return *pde_;
}

template <typename T>
void ToyModel<T>::set_training(bool on) {
  if (on && frozen_) throw StateError("ToyModel: frozen models cannot return to training");
  training_ = on;
  if (pde_) pde_->set_training(on);
}

template <typename T>
void ToyModel<T>::freeze() {
  set_training(false);
  if (pde_) pde_->freeze();
  frozen_ = true;
}

template <typename T>
std::size_t ToyModel<T>::macs(std::size_t height, std::size_t width) const {
  const std::size_t full = height * width, half = full / 4;
  std::size_t total = conv_macs(enc1_.spec, full) + conv_macs(enc2_.spec, half) +
                      conv_macs(dec_conv1_.spec, half) + conv_macs(dec_conv2_.spec, full);
  if (attn_) {
    const std::size_t c = attn_->channels();
    total += 4 * half * c * c + 2 * half * half * c;
  }
  if (pde_) {
    const PdeConfig& p = pde_->config();
    const std::size_t d_c = pde_->d_c();
    const ConvSpec s1{d_c, p.d_m, p.d_k}, s2{p.d_m, d_c, p.d_k};
    total += conv_macs(s1, half) + conv_macs(s2, half);
    for (const ConvSpec& s : {s1, s2}) {
      switch (p.source) {
        case KernelSource::kStatic:
          break;
        case KernelSource::kCandidateMixture:
          total += mlp_macs(d_c, p.d_e, p.candidates) + p.candidates * s.numel();
          break;
        case KernelSource::kPog: {
          const std::size_t n = s.numel();
          total += mlp_macs(d_c, p.d_e, p.d_e);
          total += p.basis_mode == pog::BasisMode::kLazy ? 2 * n * p.d_e : n * p.d_e * p.d_e;
          total += n * mlp_macs(p.d_e, p.d_e, 1);
          break;
        }
      }
    }
    if (p.mode == InsertionMode::kQkvConcat) total += conv_macs(proj_.spec, half);
  }
  return total;
}

template <typename T>
void copy_parameters(const ParamList<T>& from, const ParamList<T>& to) {
  std::map<std::string, Tensor<T>> index;
  for (const auto& p : to) index.emplace(p.name, p.tensor);
  for (const auto& p : from) {
    auto it = index.find(p.name);
    if (it == index.end()) throw LookupError("copy_parameters: no parameter named '" + p.name + "'");
    Tensor<T> dst = it->second;
    if (dst.shape() != p.tensor.shape()) {
      throw DimensionError("copy_parameters: '" + p.name + "' has shape " +
                           shape_str(dst.shape()) + " but source is " +
                           shape_str(p.tensor.shape()));
    }
    dst.mutable_value() = p.tensor.value();
  }
}

template <typename T>
ToyModel<T> insert_pde(const ToyModel<T>& base, const PdeConfig& pde, std::uint64_t seed) {
  if (!base.config().attention)
    throw ConfigError("insert_pde: host model has no decoder attention block");
  if (base.has_pde()) throw ConfigError("insert_pde: host model already has a PDE block");
  ToyModelConfig cfg = base.config();
  cfg.pde = pde;
  ToyModel<T> model(cfg, seed);
  copy_parameters(base.parameters(), model.parameters());
  model.pde().zero_output();
  return model;
}

bool glob_match(const std::string& pattern, const std::string& text) {
  std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p, ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<LayerInfo> select_layers(const std::vector<LayerInfo>& layers,
                                     const std::string& patterns) {
  std::vector<std::string> globs;
  std::stringstream ss(patterns);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) globs.push_back(item);
  }
  std::vector<LayerInfo> out;
  for (const auto& layer : layers)
    if (std::any_of(globs.begin(), globs.end(),
                    [&](const std::string& g) { return glob_match(g, layer.id); }))
      out.push_back(layer);
  return out;
}

#define GENEFX_INSTANTIATE_MODEL(T)                                          \
  template class ToyModel<T>;                                                \
  template void copy_parameters(const ParamList<T>&, const ParamList<T>&);   \
  template ToyModel<T> insert_pde(const ToyModel<T>&, const PdeConfig&, std::uint64_t);

GENEFX_INSTANTIATE_MODEL(float)
GENEFX_INSTANTIATE_MODEL(double)

}  // namespace genefx
