// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "genefx/ndarray.hpp"

namespace genefx::metrics {

/// PSNR reported for identical inputs (MSE == 0).
inline constexpr double kPsnrCapDb = 100.0;
inline constexpr std::size_t kSsimWindow = 8;

struct MetricResult {
  std::string name;
  double value = 0.0;
  double i_max = 1.0;
  bool capped = false;  // value replaced by the documented cap
};

/// Mean squared elementwise difference, accumulated in double.
double mse(const NdArray<float>& a, const NdArray<float>& b);

/// 10·log10(i_max²/mse); kPsnrCapDb with capped=true when mse == 0.
MetricResult psnr_from_mse(double mse_value, double i_max = 1.0);
MetricResult psnr(const NdArray<float>& a, const NdArray<float>& b, double i_max = 1.0);

/// Mean local SSIM of the channel-mean grayscale images, uniform 8×8 window, stride 1,
/// C1 = (0.01·i_max)², C2 = (0.03·i_max)², population (1/64) moments.
/// Accepts [C×H×W] or [1×C×H×W]. Throws ContractError when H or W is below the window.
MetricResult ssim(const NdArray<float>& a, const NdArray<float>& b, double i_max = 1.0);

}  // namespace genefx::metrics
