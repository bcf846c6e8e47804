// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "genefx/dataset.hpp"
#include "genefx/metrics.hpp"
#include "genefx/nn.hpp"
#include "genefx/rng.hpp"

// Layer-reset probes: copy-on-reset, the log-MSE divergence aggregate (DGE), the fraction of
// images improved by a reset (POI), and the static-vs-dynamic reset table.
namespace genefx::gene {

/// Any model the probes can drive: deep copy, clamped inference, and a named parameter and
/// layer registry.
template <typename M>
concept Probeable = requires(const M& m, const NdArray<float>& x) {
  { m.clone() } -> std::same_as<M>;
  { m.infer(x) } -> std::same_as<NdArray<float>>;
  { m.parameters() } -> std::same_as<ParamList<float>>;
  { m.layers() } -> std::same_as<std::vector<LayerInfo>>;
};

/// Fresh values for one parameter: (name, current value, fan_in, seed) -> replacement.
using Sampler = std::function<NdArray<float>(const std::string&, const NdArray<float>&,
                                             std::size_t, std::uint64_t)>;

/// The training initializer: Kaiming-uniform weights, zero biases.
NdArray<float> training_initializer(const std::string& name, const NdArray<float>& current,
                                    std::size_t fan_in, std::uint64_t seed);

struct ResetPlan {
  std::vector<std::string> layer_ids;
  std::uint64_t seed = 0;
  Sampler sampler = training_initializer;

  /// Throws ConfigError on duplicates and LookupError when an id is not a layer of `layers`.
  void validate(const std::vector<LayerInfo>& layers) const;
};

/// Seed for one parameter's redraw, shared across models so equal layers get equal draws.
inline std::uint64_t parameter_seed(std::uint64_t seed, const std::string& param) {
  return derive_seed(seed, "reset/" + param);
}

namespace detail {

inline const LayerInfo& find_layer(const std::vector<LayerInfo>& layers, const std::string& id) {
  for (const auto& l : layers)
    if (l.id == id) return l;
  throw LookupError("reset: unknown layer '" + id + "'");
}

inline NdArray<float> as_batch(const NdArray<float>& image) {
  if (image.rank() == 4) return image;
  if (image.rank() != 3) throw DimensionError("probe: images must be [C×H×W]");
  return image.reshaped({1, image.dim(0), image.dim(1), image.dim(2)});
}

}  // namespace detail

/// Copy of `model` with the listed layers redrawn. Every other parameter is bit-identical to
/// the original, which is left untouched. Throws LookupError for an unknown layer.
template <Probeable M>
M reset_layers(const M& model, const std::vector<std::string>& layer_ids, std::uint64_t seed,
               const Sampler& sampler = training_initializer) {
  const auto layers = model.layers();
  for (const auto& id : layer_ids) detail::find_layer(layers, id);
  M copy = model.clone();
  const auto params = copy.parameters();
  for (const auto& id : layer_ids) {
    const LayerInfo& layer = detail::find_layer(layers, id);
    for (const auto& name : layer.params) {
      auto it = std::find_if(params.begin(), params.end(),
                             [&](const NamedTensor<float>& p) { return p.name == name; });
      if (it == params.end()) throw LookupError("reset: no parameter named '" + name + "'");
      Tensor<float> t = it->tensor;
      NdArray<float> fresh = sampler(name, t.value(), layer.fan_in, parameter_seed(seed, name));
      if (fresh.shape() != t.shape())
        throw DimensionError("reset: sampler changed the shape of '" + name + "'");
      t.mutable_value() = std::move(fresh);
    }
  }
  return copy;
}

template <Probeable M>
M reset_layer(const M& model, const std::string& layer_id, std::uint64_t seed,
              const Sampler& sampler = training_initializer) {
  return reset_layers(model, {layer_id}, seed, sampler);
}

struct LayerTerms {
  std::string layer;
  std::vector<double> mse;     // per image
  std::vector<double> logmse;  // per image, 10·log10(i_max²/mse), capped
  std::vector<bool> capped;
  double delta_psnr = 0.0;     // mean PSNR(reset) - PSNR(base) against targets, if given
};

struct DgeReport {
  std::vector<LayerTerms> layers;  // plan order
  std::size_t image_count = 0;
  double i_max = 1.0;
  bool has_delta_psnr = false;
  double dge = 0.0;

  std::size_t capped_terms() const;
};

/// Mean of every logmse term, summed layer-major in report order; 0 for an empty report.
double aggregate(const DgeReport& report);

/// Line-oriented text:
///   # comment lines
///   i_max=<v>
///   term <layer> <image> <mse> <logmse> <capped>          one per layer × image
///   delta_psnr <layer> <value>                            when targets were given
///   summary layers=<n> images=<m> terms=<n·m> capped=<k> dge=<v>
/// Floating values use 17 significant digits, so awk '/^term/{s+=$5;n++} END{print s/n}'
/// reproduces dge.
void write_report(std::ostream& out, const DgeReport& report);
DgeReport read_report(std::istream& in);

/// Every plan layer is reset in turn and compared against the unreset model on every image.
/// `targets`, when non-empty, must align with `images` and adds per-layer ΔPSNR.
template <Probeable M>
DgeReport dge(const M& model, const ResetPlan& plan, const std::vector<data::Image>& images,
              double i_max = 1.0, const std::vector<data::Image>& targets = {}) {
  plan.validate(model.layers());
  if (images.empty()) throw ContractError("dge: no images");
  if (!targets.empty() && targets.size() != images.size())
    throw ContractError("dge: targets do not align with images");
  std::vector<NdArray<float>> base;
  for (const auto& x : images) base.push_back(model.infer(detail::as_batch(x)));
  DgeReport report;
  report.image_count = images.size();
  report.i_max = i_max;
  report.has_delta_psnr = !targets.empty();
  for (const auto& id : plan.layer_ids) {
    const M reset = reset_layer(model, id, plan.seed, plan.sampler);
    LayerTerms terms{id, {}, {}, {}, 0.0};
    double delta = 0.0;
    for (std::size_t j = 0; j < images.size(); ++j) {
      const NdArray<float> out = reset.infer(detail::as_batch(images[j]));
      const double e = metrics::mse(base[j], out);
      const auto term = metrics::psnr_from_mse(e, i_max);
      terms.mse.push_back(e);
      terms.logmse.push_back(term.value);
      terms.capped.push_back(term.capped);
      if (report.has_delta_psnr) {
        const auto target = detail::as_batch(targets[j]);
        delta += metrics::psnr(out, target, i_max).value - metrics::psnr(base[j], target, i_max).value;
      }
    }
    terms.delta_psnr = report.has_delta_psnr ? delta / static_cast<double>(images.size()) : 0.0;
    report.layers.push_back(std::move(terms));
  }
  report.dge = aggregate(report);
  return report;
}

struct PoiResult {
  std::string layer;
  std::size_t improved = 0;
  std::size_t total = 0;
  double fraction = 0.0;  // improved / total
};

/// Fraction of pairs whose PSNR to the high image strictly increases after the reset.
/// Throws ContractError on an empty pair list.
template <Probeable M>
PoiResult poi(const M& model, const std::string& layer_id,
              const std::vector<data::ImagePair>& pairs, std::uint64_t seed,
              const Sampler& sampler = training_initializer) {
  if (pairs.empty()) throw ContractError("poi: no pairs");
  const M reset = reset_layer(model, layer_id, seed, sampler);
  PoiResult r{layer_id, 0, pairs.size(), 0.0};
  for (const auto& p : pairs) {
    const auto x = detail::as_batch(p.low), y = detail::as_batch(p.high);
    const double before = metrics::psnr(model.infer(x), y).value;
    const double after = metrics::psnr(reset.infer(x), y).value;
    if (after > before) ++r.improved;
  }
  r.fraction = static_cast<double>(r.improved) / static_cast<double>(r.total);
  return r;
}

struct ComparisonTable {
  std::vector<std::string> layers;
  std::vector<double> static_row;   // mean ΔPSNR after reset, per layer
  std::vector<double> dynamic_row;
};

/// Mean reset ΔPSNR per plan layer for a static and a dynamic model. Throws ConfigError when a
/// plan layer is missing from either model or has different parameter shapes.
template <Probeable A, Probeable B>
ComparisonTable compare_static_dynamic(const A& static_model, const B& dynamic_model,
                                       const ResetPlan& plan,
                                       const std::vector<data::ImagePair>& pairs) {
  if (pairs.empty()) throw ContractError("compare: no pairs");
  const auto ls = static_model.layers(), ld = dynamic_model.layers();
  const auto ps = static_model.parameters(), pd = dynamic_model.parameters();
  auto shape_of = [](const ParamList<float>& params, const std::string& name) -> Shape {
    for (const auto& p : params)
      if (p.name == name) return p.tensor.shape();
    return {};
  };
  for (const auto& id : plan.layer_ids) {
    const auto has = [&](const std::vector<LayerInfo>& l) {
      return std::any_of(l.begin(), l.end(), [&](const LayerInfo& x) { return x.id == id; });
    };
    if (!has(ls) || !has(ld))
      throw ConfigError("compare: layer '" + id + "' is not present in both models");
    for (const auto& name : detail::find_layer(ls, id).params)
      if (shape_of(ps, name) != shape_of(pd, name))
        throw ConfigError("compare: parameter '" + name + "' differs between the models");
  }
  std::vector<data::Image> lows, highs;
  for (const auto& p : pairs) {
    lows.push_back(p.low);
    highs.push_back(p.high);
  }
  const auto rs = dge(static_model, plan, lows, 1.0, highs);
  const auto rd = dge(dynamic_model, plan, lows, 1.0, highs);
  ComparisonTable t;
  for (std::size_t i = 0; i < plan.layer_ids.size(); ++i) {
    t.layers.push_back(plan.layer_ids[i]);
    t.static_row.push_back(rs.layers[i].delta_psnr);
    t.dynamic_row.push_back(rd.layers[i].delta_psnr);
  }
  return t;
}

/// Two-row text table (Static / Dynamic) with one column per layer.
void write_table(std::ostream& out, const ComparisonTable& table);

}  // namespace genefx::gene
