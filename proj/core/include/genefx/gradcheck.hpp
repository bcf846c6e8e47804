// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "genefx/tensor.hpp"

namespace genefx {

/// Central differences (f(x+h·eᵢ) − f(x−h·eᵢ)) / 2h for every element of x. f must return a
/// size-1 tensor and is evaluated without gradient tracking. Throws ContractError unless
/// h > 0 and NumericError on a non-finite f value.
template <typename T>
NdArray<T> finite_diff_grad(const std::function<Tensor<T>(const Tensor<T>&)>& f,
                            const NdArray<T>& x, double h);

/// Same for a parameter captured by `loss`: each entry is perturbed in place and restored
/// bit-exactly afterwards.
template <typename T>
NdArray<T> finite_diff_param(const std::function<Tensor<T>()>& loss, Tensor<T>& param, double h);

/// max|a − b| / max(max|a|, max|b|); 0 when both are zero.
template <typename T>
double normwise_relative_error(const NdArray<T>& a, const NdArray<T>& b);

}  // namespace genefx
