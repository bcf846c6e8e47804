// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace genefx {

namespace {

template <typename T>
double scalar_of(const Tensor<T>& t) {
  if (t.size() != 1) throw ContractError("finite_diff: f must return a single value");
  const double v = t.value()[0];
  if (!std::isfinite(v)) throw NumericError("finite_diff: f returned a non-finite value");
  return v;
}

template <typename T>
NdArray<T> central(NdArray<T>& x, const std::function<double()>& eval, double h) {
  if (!(h > 0.0)) throw ContractError("finite_diff: step must be positive");
  NdArray<T> g(x.shape(), T{0});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T orig = x[i];
    x[i] = static_cast<T>(orig + h);
    const double fp = eval();
    x[i] = static_cast<T>(orig - h);
    const double fm = eval();
    x[i] = orig;
    g[i] = static_cast<T>((fp - fm) / (2.0 * h));
  }
  return g;
}

}  // namespace

template <typename T>
NdArray<T> finite_diff_grad(const std::function<Tensor<T>(const Tensor<T>&)>& f,
                            const NdArray<T>& x, double h) {
  NoGradGuard guard;
  NdArray<T> probe = x;
  return central<T>(probe, [&] { return scalar_of(f(Tensor<T>(probe))); }, h);
}

template <typename T>
NdArray<T> finite_diff_param(const std::function<Tensor<T>()>& loss, Tensor<T>& param,
                             double h) {
  NoGradGuard guard;
  return central<T>(param.mutable_value(), [&] { return scalar_of(loss()); }, h);
}

template <typename T>
double normwise_relative_error(const NdArray<T>& a, const NdArray<T>& b) {
  if (a.shape() != b.shape()) throw DimensionError("relative_error: shape mismatch");
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(static_cast<double>(a[i]) - b[i]));
    scale = std::max({scale, std::abs(static_cast<double>(a[i])), std::abs(static_cast<double>(b[i]))});
  }
  return scale == 0.0 ? 0.0 : diff / scale;
}

#define GENEFX_INSTANTIATE_GRADCHECK(T)                                                       \
  template NdArray<T> finite_diff_grad(const std::function<Tensor<T>(const Tensor<T>&)>&,    \
                                       const NdArray<T>&, double);                           \
  template NdArray<T> finite_diff_param(const std::function<Tensor<T>()>&, Tensor<T>&,       \
                                        double);                                             \
  template double normwise_relative_error(const NdArray<T>&, const NdArray<T>&);

GENEFX_INSTANTIATE_GRADCHECK(float)
GENEFX_INSTANTIATE_GRADCHECK(double)

}  // namespace genefx
