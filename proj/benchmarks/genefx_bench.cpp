// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "genefx/metrics.hpp"
#include "genefx/nn.hpp"
#include "genefx/ops.hpp"
#include "genefx/pog.hpp"
#include "genefx/trainer.hpp"
#include "oracles.hpp"

namespace genefx {
namespace {

// Args: channels, spatial side.
void BM_Conv2dForward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto s = static_cast<std::size_t>(state.range(1));
  const NoGradGuard no_grad;
  const Tensor<float> x(oracle::random_array<float>({4, c, s, s}, 1));
  const Tensor<float> w(oracle::random_array<float>({c, c, 3, 3}, 2));
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, w));
  state.SetItemsProcessed(state.iterations() * 4 * c * c * 9 * s * s);
}
BENCHMARK(BM_Conv2dForward)->Args({8, 32})->Args({16, 16})->Args({32, 32});

void BM_Conv2dBackward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const Tensor<float> x(oracle::random_array<float>({4, c, 16, 16}, 1), true);
  const Tensor<float> w(oracle::random_array<float>({c, c, 3, 3}, 2), true);
  for (auto _ : state) {
    auto loss = sum(conv2d(x, w));
    loss.backward();
  }
}
BENCHMARK(BM_Conv2dBackward)->Arg(8)->Arg(16);

// Materialized bases versus the lazy reflection, over the embedding widths of the grid.
void BM_SpecificEmbedding(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const bool lazy = state.range(1) != 0;
  const NoGradGuard no_grad;
  const auto normalized =
      pog::normalize_embeddings(Tensor<float>(oracle::random_array<float>({144, d}, 3)));
  const Tensor<float> w(oracle::random_array<float>({4, d}, 4, 0, 1));
  for (auto _ : state) {
    if (lazy) {
      benchmark::DoNotOptimize(pog::specific_embedding_lazy(normalized, w));
    } else {
      benchmark::DoNotOptimize(pog::specific_embedding(pog::householder_bases(normalized), w));
    }
  }
  state.SetLabel(lazy ? "lazy" : "materialized");
}
BENCHMARK(BM_SpecificEmbedding)->ArgsProduct({{16, 32, 64}, {0, 1}});

void BM_PogGenerate(benchmark::State& state) {
  pog::PogConfig cfg;
  cfg.conv = {4, 4, 3};
  cfg.cond_channels = 16;
  cfg.embed_dim = static_cast<std::size_t>(state.range(0));
  pog::PogGenerator<float> gen(cfg, 5);
  gen.set_training(false);
  gen.freeze();
  const NoGradGuard no_grad;
  const Tensor<float> f(oracle::random_array<float>({4, 16, 16, 16}, 6));
  for (auto _ : state) benchmark::DoNotOptimize(gen.generate(f));
}
BENCHMARK(BM_PogGenerate)->Arg(16)->Arg(32)->Arg(64);

// Arg: kernel source, -1 for no block.
void BM_ModelInfer(benchmark::State& state) {
  ToyModelConfig cfg;
  if (state.range(0) >= 0) {
    PdeConfig pde;
    pde.source = static_cast<KernelSource>(state.range(0));
    cfg.pde = pde;
    state.SetLabel(to_string(pde.source));
  } else {
    state.SetLabel("base");
  }
  ToyModel<float> model(cfg, 7);
  model.freeze();
  const auto x = oracle::random_array<float>({3, 32, 32}, 8, 0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(model.infer(x));
}
BENCHMARK(BM_ModelInfer)->Arg(-1)->Arg(0)->Arg(1)->Arg(2);

void BM_TrainStep(benchmark::State& state) {
  ToyModel<float> model({8, true, {}}, 9);
  std::vector<data::ImagePair> pairs;
  for (std::uint64_t i = 0; i < 4; ++i)
    pairs.push_back({oracle::random_array<float>({3, 32, 32}, 10 + i, 0, 0.3),
                     oracle::random_array<float>({3, 32, 32}, 20 + i, 0, 1), "p"});
  TrainConfig cfg;
  cfg.steps = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(model, pairs, cfg));
}
BENCHMARK(BM_TrainStep);

void BM_Ssim(benchmark::State& state) {
  const auto a = oracle::random_array<float>({3, 64, 64}, 11, 0, 1);
  const auto b = oracle::random_array<float>({3, 64, 64}, 12, 0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::ssim(a, b));
}
BENCHMARK(BM_Ssim);

}  // namespace
}  // namespace genefx

BENCHMARK_MAIN();
