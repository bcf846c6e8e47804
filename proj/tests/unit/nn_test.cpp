// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "genefx/gradcheck.hpp"
#include "genefx/nn.hpp"
#include "oracles.hpp"

namespace genefx {
namespace {

using F = Tensor<float>;
using D = Tensor<double>;

TEST(Conv2d, OneByOneIdentityKernelCopiesInput) {
  auto x = oracle::random_array<float>({2, 3, 5, 5}, 1);
  NdArray<float> w({3, 3, 1, 1}, 0.0f);
  for (std::size_t c = 0; c < 3; ++c) w.at(c, c, 0, 0) = 1.0f;
  EXPECT_TRUE(bit_identical(conv2d(F(x), F(w)).value(), x));
}

TEST(Conv2d, BoxFilterOnConstantImage) {
  const float c = 0.7f;
  NdArray<float> x({1, 1, 6, 6}, c);
  NdArray<float> w({1, 1, 3, 3}, 1.0f / 9.0f);
  const auto y = conv2d(F(x), F(w)).value();
  for (std::size_t i = 1; i < 5; ++i)
    for (std::size_t j = 1; j < 5; ++j) EXPECT_NEAR(y.at(0, 0, i, j), c, 1e-6);
  EXPECT_NEAR(y.at(0, 0, 0, 0), c * 4.0f / 9.0f, 1e-6);  // corner sees 4 taps
  EXPECT_NEAR(y.at(0, 0, 0, 3), c * 6.0f / 9.0f, 1e-6);  // edge sees 6 taps
}

TEST(Conv2d, MatchesNaiveOracle) {
  auto x = oracle::random_array<float>({2, 3, 8, 8}, 2);
  auto w = oracle::random_array<float>({4, 3, 3, 3}, 3);
  EXPECT_LT(oracle::max_abs(conv2d(F(x), F(w)).value(), oracle::conv2d(x, w)), 1e-5);
}

TEST(Conv2d, ChannelMismatchIsDimensionError) {
  EXPECT_THROW(conv2d(F(NdArray<float>({1, 2, 4, 4})), F(NdArray<float>({1, 3, 3, 3}))),
               DimensionError);
}

TEST(Conv2d, PerSampleUsesEachImagesKernel) {
  auto x = oracle::random_array<float>({3, 2, 6, 6}, 4);
  auto w = oracle::random_array<float>({3, 4, 2, 3, 3}, 5);
  const auto y = conv2d_per_sample(F(x), F(w)).value();
  const std::size_t per_x = 2 * 36, per_w = 4 * 2 * 9, per_y = 4 * 36;
  for (std::size_t n = 0; n < 3; ++n) {
    NdArray<float> xn({1, 2, 6, 6}, std::vector<float>(x.vec().begin() + n * per_x,
                                                       x.vec().begin() + (n + 1) * per_x));
    NdArray<float> wn({4, 2, 3, 3}, std::vector<float>(w.vec().begin() + n * per_w,
                                                       w.vec().begin() + (n + 1) * per_w));
    const auto ref = oracle::conv2d(xn, wn);
    for (std::size_t i = 0; i < per_y; ++i) ASSERT_NEAR(y[n * per_y + i], ref[i], 1e-5);
  }
}

TEST(Conv2d, GradientsMatchFiniteDifferences) {
  D x(oracle::random_array<double>({2, 2, 5, 5}, 6), true);
  D w(oracle::random_array<double>({3, 2, 3, 3}, 7), true);
  const auto wts = oracle::random_array<double>({2, 3, 5, 5}, 8);
  auto loss = [&] { return weighted_sum(conv2d(x, w), wts); };
  loss().backward();
  for (D* p : {&x, &w}) {
    const auto analytic = p->grad();
    EXPECT_LT(normwise_relative_error(analytic, finite_diff_param<double>(loss, *p, 1e-5)), 1e-6);
  }
}

TEST(Conv2d, PerSampleGradientsMatchFiniteDifferences) {
  D x(oracle::random_array<double>({2, 2, 4, 4}, 9), true);
  D w(oracle::random_array<double>({2, 3, 2, 3, 3}, 10), true);
  const auto wts = oracle::random_array<double>({2, 3, 4, 4}, 11);
  auto loss = [&] { return weighted_sum(conv2d_per_sample(x, w), wts); };
  loss().backward();
  for (D* p : {&x, &w}) {
    const auto analytic = p->grad();
    EXPECT_LT(normwise_relative_error(analytic, finite_diff_param<double>(loss, *p, 1e-5)), 1e-6);
  }
}

TEST(Conv2d, RandomCasesMatchOracle) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> ch(1, 4), sp(1, 9), kk(0, 2);
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t k = 2 * kk(rng) + 1;
    const Shape xs{1 + t % 2, ch(rng), sp(rng), sp(rng)};
    const Shape ws{ch(rng), xs[1], k, k};
    auto x = oracle::random_array<float>(xs, 1000 + t);
    auto w = oracle::random_array<float>(ws, 2000 + t);
    ASSERT_LT(oracle::max_abs(conv2d(F(x), F(w)).value(), oracle::conv2d(x, w)), 1e-5);
  }
}

TEST(ConvSpec, RejectsEvenKernelsAndEmptyChannels) {
  EXPECT_THROW((ConvSpec{1, 1, 2}.validate()), ConfigError);
  EXPECT_THROW((ConvSpec{0, 1, 3}.validate()), ConfigError);
  EXPECT_NO_THROW((ConvSpec{1, 1, 3}.validate()));
}

TEST(GlobalAvgPool, ConstantAndSingletonCases) {
  NdArray<float> x({1, 2, 3, 3}, 0.5f);
  EXPECT_EQ(global_avg_pool(F(x)).value().vec(), (std::vector<float>{0.5f, 0.5f}));
  NdArray<float> one({1, 3, 1, 1}, {0.1f, -2.0f, 7.0f});
  EXPECT_EQ(global_avg_pool(F(one)).value().vec(), (std::vector<float>{0.1f, -2.0f, 7.0f}));
}

TEST(GlobalAvgPool, MatchesDoubleLoopMean) {
  auto x = oracle::random_array<float>({3, 4, 5, 6}, 13);
  const auto g = global_avg_pool(F(x)).value();
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t c = 0; c < 4; ++c) {
      double acc = 0;
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 6; ++j) acc += x.at(n, c, i, j);
      EXPECT_NEAR(g.at(n, c), acc / 30.0, 1e-6);
    }
}

TEST(Pooling, AvgPoolAndUpsampleMatchLoops) {
  auto x = oracle::random_array<float>({2, 3, 4, 6}, 14);
  const auto p = avg_pool2(F(x)).value();
  ASSERT_EQ(p.shape(), (Shape{2, 3, 2, 3}));
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          const double m = (x.at(n, c, 2 * i, 2 * j) + x.at(n, c, 2 * i + 1, 2 * j) +
                            x.at(n, c, 2 * i, 2 * j + 1) + x.at(n, c, 2 * i + 1, 2 * j + 1)) / 4.0;
          EXPECT_NEAR(p.at(n, c, i, j), m, 1e-6);
        }
  const auto u = upsample_nearest2(F(p)).value();
  ASSERT_EQ(u.shape(), x.shape());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(u.at(1, 2, i, j), p.at(1, 2, i / 2, j / 2));
  EXPECT_THROW(avg_pool2(F(NdArray<float>({1, 1, 3, 4}))), DimensionError);
}

TEST(Pooling, GradientsMatchFiniteDifferences) {
  D x(oracle::random_array<double>({1, 2, 4, 4}, 15), true);
  const auto wts = oracle::random_array<double>({1, 2, 4, 4}, 16);
  auto loss = [&] { return weighted_sum(upsample_nearest2(avg_pool2(x)), wts); };
  loss().backward();
  const auto analytic = x.grad();
  EXPECT_LT(normwise_relative_error(analytic, finite_diff_param<double>(loss, x, 1e-5)), 1e-6);
}

TEST(InitParams, DeterministicAndWithinBound) {
  const ConvSpec spec{4, 8, 3};
  const auto a = init_params<float>(spec, 42).value();
  const auto b = init_params<float>(spec, 42).value();
  EXPECT_TRUE(bit_identical(a, b));
  EXPECT_FALSE(bit_identical(a, init_params<float>(spec, 43).value()));
  const double bound = std::sqrt(6.0 / spec.fan_in());
  for (auto v : a.data()) EXPECT_LE(std::abs(v), bound);
}

TEST(InitParams, EmpiricalVarianceMatchesUniformBound) {
  const std::size_t fan_in = 27;
  const auto a = kaiming_uniform<double>({100000}, fan_in, 7);
  double mean = 0, var = 0;
  for (auto v : a.data()) mean += v;
  mean /= a.size();
  for (auto v : a.data()) var += (v - mean) * (v - mean);
  var /= a.size();
  // U(-b, b) has variance b²/3 = 2/fan_in.
  EXPECT_NEAR(var / (2.0 / fan_in), 1.0, 0.05);
}

TEST(Attention, UniformWeightsAndIdentityValueGiveSpatialMean) {
  AttentionBlock<float> attn(2, 1);
  for (auto* conv : {&attn.q, &attn.k}) conv->weight.mutable_value().fill(0.0f);
  for (auto* conv : {&attn.v, &attn.o}) {
    auto& w = conv->weight.mutable_value();
    w.fill(0.0f);
    w.at(0, 0, 0, 0) = 1.0f;
    w.at(1, 1, 0, 0) = 1.0f;
  }
  auto x = oracle::random_array<float>({1, 2, 3, 3}, 17);
  const auto out = attn.forward(F(x)).out.value();
  for (std::size_t c = 0; c < 2; ++c) {
    double m = 0;
    for (std::size_t i = 0; i < 9; ++i) m += x[c * 9 + i];
    m /= 9;
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(out[c * 9 + i], m, 1e-6);
  }
}

TEST(Attention, SinglePositionReturnsValueProjection) {
  AttentionBlock<float> attn(3, 2);
  auto x = oracle::random_array<float>({2, 3, 1, 1}, 18);
  const auto r = attn.forward(F(x));
  const auto v = attn.v.forward(F(x));
  const auto expected = attn.o.forward(v).value();
  EXPECT_LT(oracle::max_abs(r.out.value(), expected), 1e-6);
  EXPECT_EQ(r.qkv.shape(), (Shape{2, 9, 1, 1}));
}

TEST(Attention, RowsSumToOne) {
  AttentionBlock<float> attn(4, 3);
  const auto r = attn.forward(F(oracle::random_array<float>({2, 4, 4, 4}, 19)));
  const auto& w = r.weights.value();
  const std::size_t p = 16;
  for (std::size_t row = 0; row < 2 * p; ++row) {
    double t = 0;
    for (std::size_t j = 0; j < p; ++j) t += w[row * p + j];
    EXPECT_NEAR(t, 1.0, 1e-5);
  }
}

TEST(Attention, OversizeInputIsResourceError) {
  AttentionBlock<float> attn(1, 4);
  EXPECT_THROW(attn.forward(F(NdArray<float>({1, 1, 33, 32}))), ResourceError);
}

TEST(Attention, GradientsMatchFiniteDifferences) {
  AttentionBlock<double> attn(2, 5);
  D x(oracle::random_array<double>({1, 2, 2, 3}, 20), true);
  const auto wts = oracle::random_array<double>({1, 2, 2, 3}, 21);
  auto loss = [&] { return weighted_sum(attn.forward(x).out, wts); };
  loss().backward();
  ParamList<double> params;
  attn.collect("attn", params);
  params.push_back({"x", x});
  for (auto& p : params) {
    const auto analytic = p.tensor.grad();
    const auto numeric = finite_diff_param<double>(loss, p.tensor, 1e-5);
    if (p.name == "attn.k.bias") {
      // A key bias shifts every score in a row equally; softmax is invariant to that.
      EXPECT_LT(oracle::max_abs(analytic, NdArray<double>(analytic.shape(), 0.0)), 1e-12);
      EXPECT_LT(oracle::max_abs(numeric, NdArray<double>(numeric.shape(), 0.0)), 1e-8);
      continue;
    }
    EXPECT_LT(normwise_relative_error(analytic, numeric), 1e-6) << p.name;
  }
}

TEST(Mlp2, MatchesRowLoopOracle) {
  Mlp2<double> mlp(3, 4, 2, 22);
  auto x = oracle::random_array<double>({5, 3}, 23);
  const auto y = mlp.forward(D(x)).value();
  const auto& w1 = mlp.w1.value();
  const auto& w2 = mlp.w2.value();
  for (std::size_t r = 0; r < 5; ++r) {
    std::vector<double> h(4);
    for (std::size_t j = 0; j < 4; ++j) {
      double a = mlp.b1.value()[j];
      for (std::size_t i = 0; i < 3; ++i) a += x.at(r, i) * w1.at(i, j);
      h[j] = std::max(0.0, a);
    }
    for (std::size_t o = 0; o < 2; ++o) {
      double a = mlp.b2.value()[o];
      for (std::size_t j = 0; j < 4; ++j) a += h[j] * w2.at(j, o);
      EXPECT_NEAR(y.at(r, o), a, 1e-12);
    }
  }
}

}  // namespace
}  // namespace genefx
