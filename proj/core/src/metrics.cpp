// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/metrics.hpp"

#include <cmath>
#include <vector>

namespace genefx::metrics {

namespace {

void require_same_shape(const char* name, const NdArray<float>& a, const NdArray<float>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(name) + ": shape " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

// Channel-mean grayscale plane of a [C×H×W] or [1×C×H×W] image.
std::vector<double> grayscale(const NdArray<float>& img, std::size_t& h, std::size_t& w) {
  std::size_t c = 0;
  if (img.rank() == 3) {
    c = img.dim(0), h = img.dim(1), w = img.dim(2);
  } else if (img.rank() == 4 && img.dim(0) == 1) {
    c = img.dim(1), h = img.dim(2), w = img.dim(3);
  } else {
    throw DimensionError("ssim: expects [C×H×W] or [1×C×H×W], got " + shape_str(img.shape()));
  }
  std::vector<double> g(h * w, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t i = 0; i < h * w; ++i) g[i] += img[ch * h * w + i];
  for (auto& v : g) v /= static_cast<double>(c);
  return g;
}

// (h+1)×(w+1) summed-area table.
std::vector<double> integral(const std::vector<double>& v, std::size_t h, std::size_t w) {
  std::vector<double> s((h + 1) * (w + 1), 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    double row = 0.0;
    for (std::size_t x = 0; x < w; ++x) {
      row += v[y * w + x];
      s[(y + 1) * (w + 1) + x + 1] = s[y * (w + 1) + x + 1] + row;
    }
  }
  return s;
}

double box(const std::vector<double>& s, std::size_t w, std::size_t y, std::size_t x,
           std::size_t n) {
  const std::size_t stride = w + 1;
  return s[(y + n) * stride + x + n] - s[y * stride + x + n] - s[(y + n) * stride + x] +
         s[y * stride + x];
}

}  // namespace

double mse(const NdArray<float>& a, const NdArray<float>& b) {
  require_same_shape("mse", a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

MetricResult psnr_from_mse(double mse_value, double i_max) {
  if (mse_value <= 0.0) return {"psnr", kPsnrCapDb, i_max, true};
  return {"psnr", 10.0 * std::log10(i_max * i_max / mse_value), i_max, false};
}

MetricResult psnr(const NdArray<float>& a, const NdArray<float>& b, double i_max) {
  return psnr_from_mse(mse(a, b), i_max);
}

MetricResult ssim(const NdArray<float>& a, const NdArray<float>& b, double i_max) {
  require_same_shape("ssim", a, b);
  std::size_t h = 0, w = 0;
  const auto ga = grayscale(a, h, w);
  const auto gb = grayscale(b, h, w);
  const std::size_t n = kSsimWindow;
  if (h < n || w < n) {
    throw ContractError("ssim: image " + std::to_string(h) + "x" + std::to_string(w) +
                        " is smaller than the " + std::to_string(n) + "x" + std::to_string(n) +
                        " window");
  }
  std::vector<double> aa(h * w), bb(h * w), ab(h * w);
  for (std::size_t i = 0; i < h * w; ++i) {
    aa[i] = ga[i] * ga[i];
    bb[i] = gb[i] * gb[i];
    ab[i] = ga[i] * gb[i];
  }
  const auto sa = integral(ga, h, w), sb = integral(gb, h, w);
  const auto saa = integral(aa, h, w), sbb = integral(bb, h, w), sab = integral(ab, h, w);
  const double c1 = (0.01 * i_max) * (0.01 * i_max);
  const double c2 = (0.03 * i_max) * (0.03 * i_max);
  const double inv = 1.0 / static_cast<double>(n * n);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t y = 0; y + n <= h; ++y) {
    for (std::size_t x = 0; x + n <= w; ++x) {
      const double mu_a = box(sa, w, y, x, n) * inv;
      const double mu_b = box(sb, w, y, x, n) * inv;
      const double var_a = box(saa, w, y, x, n) * inv - mu_a * mu_a;
      const double var_b = box(sbb, w, y, x, n) * inv - mu_b * mu_b;
      const double cov = box(sab, w, y, x, n) * inv - mu_a * mu_b;
      total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++count;
    }
  }
  return {"ssim", total / static_cast<double>(count), i_max, false};
}

}  // namespace genefx::metrics
