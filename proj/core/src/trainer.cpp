// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/trainer.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "genefx/checkpoint.hpp"
#include "genefx/rng.hpp"

namespace genefx {

std::string to_string(LossKind kind) { return kind == LossKind::kL1 ? "l1" : "l2"; }

LossKind parse_loss_kind(const std::string& text) {
  if (text == "l1") return LossKind::kL1;
  if (text == "l2") return LossKind::kL2;
  throw ConfigError("unknown loss '" + text + "' (expected l1 or l2)");
}

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train: lr must be >= 0");
  if (batch == 0) throw ConfigError("train: batch must be positive");
  if (pde.d_m == 0 || pde.d_e == 0 || pde.d_k == 0)
    throw ConfigError("train: block widths must be positive");
}

template <typename T>
Adam<T>::Adam(ParamList<T> params, double lr) : params_(std::move(params)), lr_(lr) {
  for (const auto& p : params_) {
    m_.emplace_back(p.tensor.shape(), 0.0);
    v_.emplace_back(p.tensor.shape(), 0.0);
  }
}

template <typename T>
void Adam<T>::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor<T>& p = params_[i].tensor;
    if (!p.requires_grad() || !p.has_grad()) continue;
    const auto& g = p.grad();
    auto& value = p.mutable_value();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double gj = g[j];
      m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * gj;
      v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * gj * gj;
      const double update = lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + kEps);
      value[j] = static_cast<T>(value[j] - update);
    }
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

template <typename T>
Tensor<T> reconstruction_loss(const Tensor<T>& pred, const Tensor<T>& target, LossKind kind) {
  auto diff = sub(pred, target);
  return mean(kind == LossKind::kL1 ? abs(diff) : square(diff));
}

NdArray<float> stack(const std::vector<const data::Image*>& images) {
  if (images.empty()) throw ContractError("stack: no images");
  const Shape& s = images.front()->shape();
  Shape shape{images.size()};
  shape.insert(shape.end(), s.begin(), s.end());
  NdArray<float> out(shape, 0.0f);
  const std::size_t n = images.front()->size();
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i]->shape() != s) throw DimensionError("stack: images differ in shape");
    std::copy(images[i]->data().begin(), images[i]->data().end(), out.data().begin() + i * n);
  }
  return out;
}

namespace {

template <typename T>
std::string norm_report(const ToyModel<T>& model) {
  std::ostringstream os;
  for (const auto& p : model.parameters()) {
    double acc = 0.0;
    for (auto v : p.tensor.value().data()) acc += static_cast<double>(v) * v;
    os << "\n  " << p.name << " norm=" << std::sqrt(acc);
  }
  return os.str();
}

}  // namespace

template <typename T>
TrainResult train(ToyModel<T>& model, const std::vector<data::ImagePair>& pairs,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (pairs.empty()) throw ConfigError("train: dataset is empty");
  model.set_training(true);
  Adam<T> opt(model.parameters(), cfg.lr);
  Rng rng(derive_seed(cfg.seed, "batches"));
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  TrainResult result;
  result.loss_curve.reserve(cfg.steps);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    std::vector<const data::Image*> lows, highs;
    for (std::size_t b = 0; b < cfg.batch; ++b) {
      const auto& p = pairs[pick(rng)];
      lows.push_back(&p.low);
      highs.push_back(&p.high);
    }
    Tensor<T> x(stack(lows).template cast<T>());
    Tensor<T> y(stack(highs).template cast<T>());
    auto loss = reconstruction_loss(model.forward(x), y, cfg.loss);
    const double value = loss.value()[0];
    if (!std::isfinite(value)) {
      throw NumericError("train: loss is " + std::to_string(value) + " at step " +
                         std::to_string(step) + "; parameter norms:" + norm_report(model));
    }
    result.loss_curve.push_back(value);
    opt.zero_grad();
    loss.backward();
    opt.step();
  }
  result.steps = cfg.steps;
  return result;
}

FineTuneResult fine_tune_with_pde(const ToyModel<float>& base,
                                  const std::vector<data::ImagePair>& pairs,
                                  const TrainConfig& cfg) {
  cfg.validate();
  ToyModel<float> model = insert_pde(base, cfg.pde, derive_seed(cfg.seed, "pde"));
  auto params = model.parameters();
  const auto is_block = [](const std::string& name) { return name.rfind("pde.", 0) == 0; };
  if (!cfg.joint)
    for (auto& p : params)
      if (!is_block(p.name)) p.tensor.set_requires_grad(false);
  TrainResult tr = train(model, pairs, cfg);
  for (auto& p : params) p.tensor.set_requires_grad(true);
  return {std::move(model), std::move(tr)};
}

FineTuneResult fine_tune_with_pde(const std::filesystem::path& base_checkpoint,
                                  const std::vector<data::ImagePair>& pairs,
                                  const TrainConfig& cfg) {
  const auto entries = ckpt::load_entries(base_checkpoint);
  const ToyModelConfig arch = ckpt::config_from_entries(entries);
  if (arch.pde) {
    throw ConfigError("fine_tune_with_pde: base checkpoint '" + base_checkpoint.string() +
                      "' already contains a PDE block");
  }
  ToyModel<float> base(arch, 0);
  ckpt::load_into(base, entries);
  return fine_tune_with_pde(base, pairs, cfg);
}

void write_loss_curve(std::ostream& out, const std::vector<double>& curve) {
  out << "step,loss\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < curve.size(); ++i) out << i << ',' << curve[i] << '\n';
}

#define GENEFX_INSTANTIATE_TRAINER(T)                                                      \
  template class Adam<T>;                                                                  \
  template Tensor<T> reconstruction_loss(const Tensor<T>&, const Tensor<T>&, LossKind);    \
  template TrainResult train(ToyModel<T>&, const std::vector<data::ImagePair>&,            \
                             const TrainConfig&);

GENEFX_INSTANTIATE_TRAINER(float)
GENEFX_INSTANTIATE_TRAINER(double)

}  // namespace genefx
