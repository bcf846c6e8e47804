// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "genefx/dataset.hpp"
#include "genefx/model.hpp"

namespace genefx {

enum class LossKind { kL1, kL2 };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& text);

struct TrainConfig {
  double lr = 2e-3;
  std::size_t steps = 600;
  std::size_t batch = 4;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::kL1;
  PdeConfig pde;        // used by fine-tuning
  bool joint = false;   // fine-tune base weights together with the block

  /// Throws ConfigError unless lr >= 0, batch > 0 and the block widths are positive.
  /// Zero steps is accepted.
  void validate() const;
};

/// Adam with bias correction; updates only parameters that require gradients.
template <typename T>
class Adam {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  Adam(ParamList<T> params, double lr);

  /// One update from the gradients currently held by the parameters. Parameters without a
  /// gradient are skipped.
  void step();
  void zero_grad();
  std::size_t steps_taken() const noexcept { return t_; }

 private:
  ParamList<T> params_;
  std::vector<NdArray<double>> m_, v_;
  double lr_;
  std::size_t t_ = 0;
};

struct TrainResult {
  std::vector<double> loss_curve;  // one value per step, before that step's update
  std::size_t steps = 0;
};

/// Mean L1 or L2 difference between prediction and target.
template <typename T>
Tensor<T> reconstruction_loss(const Tensor<T>& pred, const Tensor<T>& target, LossKind kind);

/// Runs cfg.steps Adam steps on random minibatches (drawn with replacement, seeded by
/// cfg.seed). Throws ConfigError on an empty dataset and NumericError, with the step and the
/// per-parameter norms, when the loss stops being finite.
template <typename T>
TrainResult train(ToyModel<T>& model, const std::vector<data::ImagePair>& pairs,
                  const TrainConfig& cfg);

struct FineTuneResult {
  ToyModel<float> model;
  TrainResult train;
};

/// Inserts an identity-initialized block (cfg.pde) into a copy of `base` and trains it for
/// cfg.steps. Base weights stay fixed unless cfg.joint. Throws ConfigError when the base
/// already has a block.
FineTuneResult fine_tune_with_pde(const ToyModel<float>& base,
                                  const std::vector<data::ImagePair>& pairs,
                                  const TrainConfig& cfg);
/// Same, reading the base from a checkpoint.
FineTuneResult fine_tune_with_pde(const std::filesystem::path& base_checkpoint,
                                  const std::vector<data::ImagePair>& pairs,
                                  const TrainConfig& cfg);

/// Writes `step,loss` lines after a header.
void write_loss_curve(std::ostream& out, const std::vector<double>& curve);

/// Stacks images [3×H×W] into a batch [B×3×H×W].
NdArray<float> stack(const std::vector<const data::Image*>& images);

}  // namespace genefx
