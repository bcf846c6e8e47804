// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "genefx/gradcheck.hpp"
#include "genefx/ops.hpp"
#include "genefx/tensor.hpp"
#include "oracles.hpp"

namespace genefx {
namespace {

using F = Tensor<float>;

TEST(NdArray, RejectsZeroExtentAndSizeMismatch) {
  EXPECT_THROW(NdArray<float>({2, 0}), DimensionError);
  EXPECT_THROW(NdArray<float>({2, 2}, std::vector<float>{1, 2, 3}), DimensionError);
  NdArray<float> a({2, 3}, 1.5f);
  EXPECT_EQ(a.size(), 6u);
  EXPECT_EQ(shape_numel(a.shape()), a.size());
}

TEST(Matmul, IdentityAndAnalyticCases) {
  F eye(NdArray<float>({2, 2}, {1, 0, 0, 1}));
  F m(NdArray<float>({2, 2}, {1, 2, 3, 4}));
  EXPECT_EQ(matmul(eye, m).value().vec(), (std::vector<float>{1, 2, 3, 4}));
  F a(NdArray<float>({2, 2}, {1, 0, 0, 0}));
  F b(NdArray<float>({2, 1}, {5, 7}));
  EXPECT_EQ(matmul(a, b).value().vec(), (std::vector<float>{5, 0}));
}

TEST(Matmul, MatchesTripleLoopOracle) {
  auto a = oracle::random_array<float>({7, 5}, 1);
  auto b = oracle::random_array<float>({5, 3}, 2);
  EXPECT_LT(oracle::max_abs(matmul(F(a), F(b)).value(), oracle::matmul(a, b)), 1e-6);
}

TEST(Matmul, RandomShapesUpTo16MatchOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> ext(1, 16);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = ext(rng), k = ext(rng), n = ext(rng);
    auto a = oracle::random_array<float>({m, k}, 100 + trial);
    auto b = oracle::random_array<float>({k, n}, 200 + trial);
    ASSERT_LT(oracle::max_abs(matmul(F(a), F(b)).value(), oracle::matmul(a, b)), 1e-5)
        << m << "x" << k << "x" << n;
  }
}

TEST(Matmul, InnerMismatchIsDimensionError) {
  EXPECT_THROW(matmul(F(NdArray<float>({2, 3})), F(NdArray<float>({2, 3}))), DimensionError);
}

TEST(Elementwise, MatchNaiveLoopsOnRandomShapes) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> ext(1, 16);
  for (int trial = 0; trial < 100; ++trial) {
    const Shape s{ext(rng), ext(rng)};
    auto a = oracle::random_array<float>(s, 300 + trial);
    auto b = oracle::random_array<float>(s, 400 + trial);
    const auto sum_ = add(F(a), F(b)).value(), prod = mul(F(a), F(b)).value();
    const auto diff = sub(F(a), F(b)).value(), r = relu(F(a)).value();
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_FLOAT_EQ(sum_[i], a[i] + b[i]);
      ASSERT_FLOAT_EQ(diff[i], a[i] - b[i]);
      ASSERT_FLOAT_EQ(prod[i], a[i] * b[i]);
      ASSERT_FLOAT_EQ(r[i], std::max(0.0f, a[i]));
    }
  }
}

TEST(Backward, SumGivesOnes) {
  F x(NdArray<float>({3}, {0.5f, -2.0f, 4.0f}), true);
  sum(x).backward();
  EXPECT_EQ(x.grad().vec(), (std::vector<float>{1, 1, 1}));
}

TEST(Backward, SumOfSquaresGivesTwiceInput) {
  F x(NdArray<float>({2}, {2.0f, -3.0f}), true);
  sum(mul(x, x)).backward();
  EXPECT_EQ(x.grad().vec(), (std::vector<float>{4, -6}));
}

TEST(Backward, NonScalarLossIsContractError) {
  F x(NdArray<float>({2}, {1, 2}), true);
  EXPECT_THROW(mul(x, x).backward(), ContractError);
}

TEST(Backward, SecondBackwardOnSameGraphIsStateError) {
  F x(NdArray<float>({2}, {1, 2}), true);
  auto loss = sum(mul(x, x));
  loss.backward();
  EXPECT_THROW(loss.backward(), StateError);
}

TEST(Backward, SharedSubexpressionVisitedOnce) {
  // y = x·x is used twice; d/dx of (sum(y) + sum(y)) = 4x.
  F x(NdArray<float>({2}, {1.5f, -1.0f}), true);
  auto y = mul(x, x);
  add(sum(y), sum(y)).backward();
  EXPECT_FLOAT_EQ(x.grad()[0], 6.0f);
  EXPECT_FLOAT_EQ(x.grad()[1], -4.0f);
}

TEST(GradTape, VisitsEachNodeOnceInTopologicalOrder) {
  F x(NdArray<float>({2}, {1, 2}), true);
  auto a = mul(x, x);
  auto b = add(a, x);
  auto loss = sum(add(a, b));
  detail::GradTape<float> tape(loss.node_ptr());
  EXPECT_EQ(tape.size(), 5u);
  EXPECT_LT(tape.index_of(x.node()), tape.index_of(a.node()));
  EXPECT_LT(tape.index_of(a.node()), tape.index_of(b.node()));
  EXPECT_LT(tape.index_of(b.node()), tape.index_of(loss.node()));
}

TEST(NoGrad, GuardStopsRecording) {
  F x(NdArray<float>({2}, {1, 2}), true);
  NoGradGuard guard;
  auto y = mul(x, x);
  EXPECT_FALSE(y.requires_grad());
}

TEST(Softmax, UniformAndAnalyticCases) {
  const auto u = softmax(std::vector<float>{0, 0, 0, 0});
  for (float v : u) EXPECT_FLOAT_EQ(v, 0.25f);
  const auto s = softmax(std::vector<double>{std::log(2.0), 0.0});
  EXPECT_NEAR(s[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s[1], 1.0 / 3.0, 1e-12);
}

TEST(Softmax, ShiftInvariantOver100Seeds) {
  for (int seed = 0; seed < 100; ++seed) {
    auto v = oracle::random_array<double>({9}, 500 + seed, -5, 5).vec();
    auto shifted = v;
    for (auto& x : shifted) x += 100.0;
    const auto a = softmax(v), b = softmax(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Softmax, RowsSumToOneAndSurviveLargeLogits) {
  F a(NdArray<float>({2, 3}, {1000, 1001, 999, -50, 0, 50}));
  const auto s = softmax_rows(a).value();
  for (std::size_t r = 0; r < 2; ++r) {
    double t = 0;
    for (std::size_t c = 0; c < 3; ++c) t += s[r * 3 + c];
    EXPECT_NEAR(t, 1.0, 1e-6);
  }
  EXPECT_TRUE(all_finite(s));
}

TEST(FiniteDiff, SumIsAllOnes) {
  auto x = oracle::random_array<double>({5}, 3);
  const auto g = finite_diff_grad<double>([](const Tensor<double>& t) { return sum(t); }, x, 1e-4);
  for (auto v : g.data()) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(FiniteDiff, SquareAtThreeIsSix) {
  NdArray<double> x({1}, 3.0);
  const auto g =
      finite_diff_grad<double>([](const Tensor<double>& t) { return sum(mul(t, t)); }, x, 1e-4);
  EXPECT_NEAR(g[0], 6.0, 1e-6);
}

TEST(FiniteDiff, NonFiniteOutputIsNumericError) {
  NdArray<double> x({1}, 1.0);
  auto f = [](const Tensor<double>&) {
    return Tensor<double>(NdArray<double>({1}, std::numeric_limits<double>::infinity()));
  };
  EXPECT_THROW(finite_diff_grad<double>(f, x, 1e-3), NumericError);
  EXPECT_THROW(finite_diff_grad<double>([](const Tensor<double>& t) { return sum(t); }, x, 0.0),
               ContractError);
}

// Two-layer MLP loss with all parameters checked against central differences.
template <typename T>
double mlp_relative_error(std::uint64_t seed, double h) {
  Tensor<T> x(oracle::random_array<T>({3, 4}, seed));
  Tensor<T> w1(oracle::random_array<T>({4, 5}, seed + 1), true);
  Tensor<T> b1(oracle::random_array<T>({5}, seed + 2), true);
  Tensor<T> w2(oracle::random_array<T>({5, 2}, seed + 3), true);
  const NdArray<T> wts = oracle::random_array<T>({3, 2}, seed + 4);
  auto loss = [&] { return weighted_sum(matmul(relu(add_row_bias(matmul(x, w1), b1)), w2), wts); };
  loss().backward();
  double worst = 0;
  for (Tensor<T>* p : {&w1, &b1, &w2}) {
    const auto analytic = p->grad();
    const auto numeric = finite_diff_param<T>(loss, *p, h);
    worst = std::max(worst, normwise_relative_error(analytic, numeric));
  }
  return worst;
}

TEST(FiniteDiff, AgreesWithBackwardOnTwoLayerMlp) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_LT(mlp_relative_error<float>(seed * 10, 1e-3), 1e-3) << "seed " << seed;
    EXPECT_LT(mlp_relative_error<double>(seed * 10, 1e-5), 1e-6) << "seed " << seed;
  }
}

TEST(FiniteDiff, ParameterRestoredBitExactly) {
  Tensor<double> p(oracle::random_array<double>({4}, 9), true);
  const auto before = p.value();
  finite_diff_param<double>([&] { return sum(mul(p, p)); }, p, 1e-3);
  EXPECT_TRUE(bit_identical(before, p.value()));
}

TEST(Determinism, SameInputsGiveBitIdenticalOutputs) {
  auto a = oracle::random_array<float>({6, 6}, 1), b = oracle::random_array<float>({6, 6}, 2);
  EXPECT_TRUE(bit_identical(matmul(F(a), F(b)).value(), matmul(F(a), F(b)).value()));
}

}  // namespace
}  // namespace genefx
