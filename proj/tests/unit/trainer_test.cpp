// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "genefx/checkpoint.hpp"
#include "genefx/trainer.hpp"
#include "oracles.hpp"

namespace genefx {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / "genefx_trainer_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<data::ImagePair> pairs(std::size_t count, std::size_t size, std::uint64_t seed) {
  data::DatasetParams dp;
  dp.seed = seed;
  dp.train_fraction = 1.0;
  std::vector<data::ImagePair> out;
  for (const auto& s : data::procedural_sources(count, size, seed)) {
    const auto p = data::draw_degrade(dp, s.id, s.image);
    out.push_back({data::degrade(s.image, p), s.image, s.id});
  }
  return out;
}

ToyModelConfig small() { return {4, true, {}}; }

PdeConfig small_pde(KernelSource source = KernelSource::kPog, std::size_t d_m = 2) {
  PdeConfig c;
  c.d_m = d_m;
  c.d_e = 8;
  c.source = source;
  return c;
}

TrainConfig quick(std::size_t steps, std::uint64_t seed = 0) {
  TrainConfig c;
  c.steps = steps;
  c.seed = seed;
  c.batch = 2;
  c.pde = small_pde();
  return c;
}

bool same_parameters(const ToyModel<float>& a, const ToyModel<float>& b) {
  const auto pa = a.parameters(), pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (pa[i].name != pb[i].name || !bit_identical(pa[i].tensor.value(), pb[i].tensor.value()))
      return false;
  return true;
}

TEST(Model, FreshModelIsIdentityAndInferenceClamps) {
  ToyModel<float> m(small(), 1);
  const auto x = oracle::random_array<float>({2, 3, 8, 8}, 2, 0, 1);
  EXPECT_TRUE(bit_identical(m.forward(Tensor<float>(x)).value(), x));
  auto w = m.param("dec.conv2.weight");
  w.mutable_value() = NdArray<float>(w.shape(), 5.0f);
  const auto clamped = m.infer(x);
  for (auto v : clamped.data()) {
    ASSERT_GE(v, 0.0f);
    ASSERT_LE(v, 1.0f);
  }
  EXPECT_EQ(m.infer(NdArray<float>({3, 8, 8}, 0.5f)).rank(), 3u);
  EXPECT_THROW(m.forward(Tensor<float>(NdArray<float>({1, 3, 7, 8}))), DimensionError);
}

TEST(Model, CloneIsDeep) {
  ToyModel<float> m(small(), 3);
  const auto copy = m.clone();
  m.param("enc.conv1.weight").mutable_value().fill(0.0f);
  EXPECT_FALSE(bit_identical(copy.param("enc.conv1.weight").value(),
                             m.param("enc.conv1.weight").value()));
}

TEST(Model, LookupAndLayerSelection) {
  ToyModel<float> m(small(), 4);
  EXPECT_THROW(m.param("nope.weight"), LookupError);
  std::vector<std::string> ids;
  for (const auto& l : select_layers(m.layers(), kDefaultProbe)) ids.push_back(l.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"dec.attn.q", "dec.attn.k", "dec.attn.v", "dec.attn.o",
                                           "dec.conv1", "dec.conv2"}));
  EXPECT_TRUE(select_layers(m.layers(), "").empty());
  EXPECT_EQ(select_layers(m.layers(), "enc.conv?,dec.conv2").size(), 3u);
  EXPECT_TRUE(glob_match("a*c", "abbbc"));
  EXPECT_FALSE(glob_match("a?c", "abbc"));
}

TEST(Model, FrozenModelsStayInEvalMode) {
  ToyModel<float> m(small(), 5);
  m.freeze();
  EXPECT_THROW(m.set_training(true), StateError);
}

TEST(Model, MacsGrowWithBlockAndArea) {
  ToyModel<float> m(small(), 6);
  const auto with = insert_pde(m, small_pde(), 7);
  EXPECT_GT(m.macs(16, 16), 0u);
  EXPECT_GT(with.macs(16, 16), m.macs(16, 16));
  EXPECT_GT(m.macs(32, 32), m.macs(16, 16));
}

TEST(Adam, ZeroLearningRateLeavesParametersUnchanged) {
  ToyModel<float> m(small(), 8);
  const auto before = m.clone();
  TrainConfig c = quick(5);
  c.lr = 0.0;
  train(m, pairs(4, 8, 1), c);
  EXPECT_TRUE(same_parameters(m, before));
}

TEST(Adam, FirstStepMovesEachWeightByLearningRate) {
  Tensor<double> p(NdArray<double>({3}, {1.0, -2.0, 0.5}), true);
  Adam<double> opt({{"p", p}}, 0.1);
  sum(mul(p, p)).backward();
  opt.step();
  // Bias-corrected first step is lr·sign(g) up to the epsilon term.
  EXPECT_NEAR(p.value()[0], 0.9, 1e-7);
  EXPECT_NEAR(p.value()[1], -1.9, 1e-7);
  EXPECT_NEAR(p.value()[2], 0.4, 1e-7);
  EXPECT_EQ(opt.steps_taken(), 1u);
}

TEST(Train, SinglePairIsFitted) {
  ToyModel<float> m(small(), 9);
  TrainConfig c = quick(500);
  c.batch = 1;
  const auto r = train(m, pairs(1, 16, 2), c);
  ASSERT_EQ(r.loss_curve.size(), 500u);
  EXPECT_EQ(r.steps, 500u);
  EXPECT_LT(r.loss_curve.back(), 0.1 * r.loss_curve.front());
}

TEST(Train, SameSeedSameCurveAndWeights) {
  const auto data = pairs(6, 8, 3);
  ToyModel<float> a(small(), 10), b(small(), 10), c(small(), 10);
  const auto ra = train(a, data, quick(20, 1));
  const auto rb = train(b, data, quick(20, 1));
  const auto rc = train(c, data, quick(20, 2));
  EXPECT_EQ(ra.loss_curve, rb.loss_curve);
  EXPECT_TRUE(same_parameters(a, b));
  EXPECT_NE(ra.loss_curve, rc.loss_curve);
}

TEST(Train, NonFiniteLossReportsStepAndNorms) {
  auto data = pairs(2, 8, 4);
  for (auto& p : data) p.high[0] = std::numeric_limits<float>::quiet_NaN();
  ToyModel<float> m(small(), 11);
  try {
    train(m, data, quick(3));
    FAIL() << "NaN loss accepted";
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("step 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("enc.conv1.weight norm="), std::string::npos) << msg;
  }
}

TEST(Train, RejectsBadConfigs) {
  ToyModel<float> m(small(), 12);
  EXPECT_THROW(train(m, {}, quick(1)), ConfigError);
  TrainConfig c = quick(1);
  c.batch = 0;
  EXPECT_THROW(train(m, pairs(1, 8, 5), c), ConfigError);
  c = quick(1);
  c.lr = -1;
  EXPECT_THROW(train(m, pairs(1, 8, 5), c), ConfigError);
  EXPECT_EQ(parse_loss_kind("l2"), LossKind::kL2);
  EXPECT_THROW(parse_loss_kind("huber"), ConfigError);
}

TEST(Train, LossCurveCsv) {
  std::ostringstream os;
  write_loss_curve(os, {0.5, 0.25});
  EXPECT_EQ(os.str(), "step,loss\n0,0.5\n1,0.25\n");
}

TEST(FineTune, ZeroStepsReproduceBaseOutputs) {
  ToyModel<float> base(small(), 13);
  train(base, pairs(4, 8, 6), quick(10));
  const auto x = oracle::random_array<float>({1, 3, 8, 8}, 14, 0, 1);
  for (auto source : {KernelSource::kStatic, KernelSource::kCandidateMixture, KernelSource::kPog}) {
    TrainConfig c = quick(0);
    c.pde = small_pde(source);
    const auto ft = fine_tune_with_pde(base, pairs(4, 8, 6), c);
    EXPECT_TRUE(bit_identical(ft.model.infer(x), base.infer(x))) << to_string(source);
    EXPECT_TRUE(ft.train.loss_curve.empty());
  }
}

TEST(FineTune, BaseWeightsFrozenUnlessJoint) {
  ToyModel<float> base(small(), 15);
  const auto data = pairs(4, 8, 7);
  const auto ft = fine_tune_with_pde(base, data, quick(5));
  for (const auto& p : base.parameters()) {
    EXPECT_TRUE(bit_identical(ft.model.param(p.name).value(), p.tensor.value())) << p.name;
    EXPECT_TRUE(ft.model.param(p.name).requires_grad()) << p.name;
  }
  TrainConfig joint = quick(5);
  joint.joint = true;
  const auto jt = fine_tune_with_pde(base, data, joint);
  EXPECT_FALSE(bit_identical(jt.model.param("enc.conv1.weight").value(),
                             base.param("enc.conv1.weight").value()));
}

TEST(FineTune, CheckpointWithBlockIsRejected) {
  const auto path = scratch("with_block.gfx");
  ckpt::save_model(path, insert_pde(ToyModel<float>(small(), 16), small_pde(), 17));
  EXPECT_THROW(fine_tune_with_pde(path, pairs(2, 8, 8), quick(1)), ConfigError);
}

TEST(Checkpoint, RoundTripIsBitIdenticalForEverySource) {
  ToyModel<float> base(small(), 18);
  train(base, pairs(4, 8, 9), quick(3));
  std::vector<ToyModel<float>> models{base};
  for (auto source : {KernelSource::kStatic, KernelSource::kCandidateMixture, KernelSource::kPog}) {
    PdeConfig c = small_pde(source);
    c.mode = source == KernelSource::kPog ? InsertionMode::kQkvConcat : InsertionMode::kFeature;
    models.push_back(insert_pde(base, c, 19));
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto path = scratch("rt" + std::to_string(i) + ".gfx");
    ckpt::save_model(path, models[i]);
    const auto loaded = ckpt::load_model<float>(path);
    EXPECT_TRUE(same_parameters(loaded, models[i])) << i;
    EXPECT_EQ(loaded.has_pde(), models[i].has_pde());
    const auto again = scratch("rt" + std::to_string(i) + "b.gfx");
    ckpt::save_model(again, loaded);
    EXPECT_EQ(ckpt::file_fingerprint(path), ckpt::file_fingerprint(again));
  }
}

TEST(Checkpoint, DoublePrecisionRoundTrip) {
  ToyModel<double> m(small(), 20);
  const auto path = scratch("f64.gfx");
  ckpt::save_model(path, m);
  const auto loaded = ckpt::load_model<double>(path);
  const auto a = m.parameters(), b = loaded.parameters();
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_TRUE(bit_identical(a[i].tensor.value(), b[i].tensor.value()));
  EXPECT_EQ(ckpt::load_entries(path).front().dtype(), ckpt::DType::kF64);
}

TEST(Checkpoint, SameSeedSameBytes) {
  const auto data = pairs(4, 8, 10);
  std::vector<std::string> prints;
  for (int run = 0; run < 2; ++run) {
    ToyModel<float> m(small(), 21);
    train(m, data, quick(5, 3));
    const auto path = scratch("seed" + std::to_string(run) + ".gfx");
    ckpt::save_model(path, m);
    prints.push_back(ckpt::file_fingerprint(path));
  }
  EXPECT_EQ(prints[0], prints[1]);
  EXPECT_EQ(prints[0].size(), 16u);
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

TEST(Checkpoint, CorruptFilesAreFormatErrors) {
  const auto good = scratch("good.gfx");
  ckpt::save_model(good, ToyModel<float>(small(), 22));
  const std::string bytes = read_bytes(good);
  const auto bad = scratch("bad.gfx");
  write_bytes(bad, bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(ckpt::load_entries(bad), FormatError);
  write_bytes(bad, "XXXX" + bytes.substr(4));
  EXPECT_THROW(ckpt::load_entries(bad), FormatError);
  std::string version = bytes;
  version[4] = 7;
  write_bytes(bad, version);
  EXPECT_THROW(ckpt::load_entries(bad), FormatError);
  write_bytes(bad, bytes + "x");
  EXPECT_THROW(ckpt::load_entries(bad), FormatError);
  EXPECT_THROW(ckpt::load_entries(scratch("missing.gfx")), IoError);
}

TEST(Checkpoint, ShapeMismatchNamesTheTensorAndLeavesModelUntouched) {
  const auto base = ToyModel<float>(small(), 23);
  const auto wide = insert_pde(base, small_pde(KernelSource::kPog, 3), 24);
  auto narrow = insert_pde(base, small_pde(KernelSource::kPog, 2), 24);
  const auto before = narrow.clone();
  const auto path = scratch("wide.gfx");
  ckpt::save_model(path, wide);
  try {
    ckpt::load_into(narrow, ckpt::load_entries(path));
    FAIL() << "mismatched bottleneck accepted";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("pde.gen1.embed"), std::string::npos) << e.what();
  }
  EXPECT_TRUE(same_parameters(narrow, before));
}

TEST(Checkpoint, MissingOrExtraTensorsAreFormatErrors) {
  const auto base = ToyModel<float>(small(), 25);
  const auto path = scratch("base.gfx");
  ckpt::save_model(path, base);
  auto with = insert_pde(base, small_pde(), 26);
  EXPECT_THROW(ckpt::load_into(with, ckpt::load_entries(path)), FormatError);
  const auto wpath = scratch("with.gfx");
  ckpt::save_model(wpath, with);
  auto plain = base.clone();
  EXPECT_THROW(ckpt::load_into(plain, ckpt::load_entries(wpath)), FormatError);
}

}  // namespace
}  // namespace genefx
