// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "subgrad/train.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "subgrad/data.hpp"
#include "test_util.hpp"

namespace subgrad {
namespace {

std::vector<TrainingExample> small_maxcut(std::size_t m, std::uint64_t seed) {
  MaxCutConfig cfg;
  cfg.m = m;
  cfg.n = 7;
  cfg.d = 4;
  cfg.k = 2;
  cfg.gamma = 0.5;
  cfg.seed = seed;
  return gen_maxcut_dataset(cfg).training_examples();
}

std::vector<TrainingExample> registries_from_modular(const std::vector<double>& s,
                                                     std::size_t count, std::uint64_t seed) {
  const ModularFn<double> f(s);
  const auto ds = sample_registries(f, LinkFunction::sigmoid(1.0), ItemOrder::identity(s.size()),
                                    count, seed);
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  return ds.training_examples(idx);
}

TEST(RbfTest, Kernel) {
  const std::vector<double> pts{0.0, 0.0, 0.3, 0.3, 0.0, 0.0};
  const auto f = rbf_graph<double>(pts, 3, 2, 0.3);
  // distance between p0 and p1 is 0.3 sqrt(2) = gamma sqrt(2).
  EXPECT_NEAR(f.weight(0, 1), 0.36787944117144233, 1e-15);
  EXPECT_EQ(f.weight(0, 2), 1.0);
  EXPECT_EQ(f.weight(1, 0), f.weight(0, 1));
  EXPECT_EQ(f.weight(1, 1), 0.0);
  EXPECT_THROW(rbf_graph<double>(pts, 3, 2, 0.0), ConfigError);
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  TrainConfig cfg;
  TrainState st;
  std::vector<double> p{1.0, -2.0};
  const std::vector<double> g{0.0, 0.0};
  adam_step(st, g, p, cfg);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0}));
}

TEST(AdamTest, FirstStepMovesBySignedLearningRate) {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  TrainState st;
  std::vector<double> p{0.0, 0.0, 0.0};
  const std::vector<double> g{3.0, -0.01, 100.0};
  adam_step(st, g, p, cfg);
  EXPECT_NEAR(p[0], -0.1, 1e-7);
  EXPECT_NEAR(p[1], 0.1, 1e-5);
  EXPECT_NEAR(p[2], -0.1, 1e-9);
}

TEST(AdamTest, DecayAndWeightDecay) {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.lr_decay = 0.5;
  cfg.weight_decay = 0.2;
  TrainState st;
  st.epoch = 2;
  std::vector<double> p{1.0};
  const std::vector<double> g{0.0};
  adam_step(st, g, p, cfg);
  // lr = 0.1 * 0.5^2
  EXPECT_NEAR(p[0], 1.0 - 0.025 * 0.2, 1e-15);
  std::vector<double> wrong{1.0, 2.0};
  EXPECT_THROW(adam_step(st, g, wrong, cfg), ShapeError);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig cfg;
  cfg.beta1 = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(NllTest, BatchMeanOfExamples) {
  const auto data = small_maxcut(5, 1);
  MaxCutProjectionModel model(2, 4, 0.5);
  init_uniform(model.params(), 3, -1.0, 1.0);
  const AlgorithmSpec spec = DoubleGreedySpec{LinkFunction::softplus_ratio(0.25), std::nullopt};
  Tape tape;
  const auto theta = tape.bind(model.params());
  const Var loss = nll(model, std::span<const Var>(theta), std::span<const TrainingExample>(data), spec);
  double mean = 0.0;
  for (const auto& ex : data) {
    const auto f = model.function<double>(model.params().values(), ex);
    mean -= set_log_likelihood(f, spec, ex.target, nullptr);
  }
  EXPECT_NEAR(loss.value(), mean / 5.0, 1e-12);
}

TEST(NllTest, HardLinkReportsExample) {
  const auto data = small_maxcut(4, 2);
  MaxCutProjectionModel model(2, 4, 0.5);
  init_uniform(model.params(), 3, -1.0, 1.0);
  const AlgorithmSpec spec = DoubleGreedySpec{LinkFunction::hard(), std::nullopt};
  Tape tape;
  const auto theta = tape.bind(model.params());
  try {
    nll(model, std::span<const Var>(theta), std::span<const TrainingExample>(data), spec);
    GTEST_SKIP() << "every target reachable under the hard link";
  } catch (const NonFiniteLikelihood& e) {
    EXPECT_LT(e.example(), 4u);
  }
}

template <Model M>
double end_to_end_error(const M& model, const TrainingExample& ex, const AlgorithmSpec& spec) {
  Rng rng = stream_rng(0, 0);
  const auto ad = example_gradient(model, ex, spec, &rng).second;
  M probe = model;
  const auto fd = testing::finite_difference(
      [&](const std::vector<double>& p) {
        probe.params().values() = p;
        Rng r = stream_rng(0, 0);
        const auto f = probe.template function<double>(probe.params().values(), ex);
        return set_log_likelihood(f, spec, ex.target, &r);
      },
      model.params().values());
  return testing::relative_error(ad, fd);
}

TEST(GradientTest, MaxCutProjection) {
  const auto data = small_maxcut(3, 4);
  MaxCutProjectionModel model(2, 4, 0.5);
  init_uniform(model.params(), 5, -1.0, 1.0);
  for (const auto& link : {LinkFunction::sigmoid(0.5), LinkFunction::softplus_ratio(0.25)}) {
    const AlgorithmSpec spec = DoubleGreedySpec{link, std::nullopt};
    for (const auto& ex : data) EXPECT_LT(end_to_end_error(model, ex, spec), 1e-5);
  }
  const AlgorithmSpec greedy = GreedySpec{0.5, SetLikelihoodMode::random_perm(8)};
  for (const auto& ex : data) EXPECT_LT(end_to_end_error(model, ex, greedy), 1e-5);
}

TEST(GradientTest, Flid) {
  FlidModel model(6, 3);
  init_uniform(model.params(), 6, -1.0, 1.0);
  const TrainingExample ex{6, 0, {}, Subset::from_items(6, {0, 3, 4})};
  EXPECT_LT(end_to_end_error(model, ex, DoubleGreedySpec{LinkFunction::sigmoid(1.0),
                                                         ItemOrder::explicit_order({5, 4, 3, 2, 1, 0})}),
            1e-5);
  EXPECT_LT(end_to_end_error(model, ex, GreedySpec{0.3}), 1e-5);
}

TEST(TrainTest, LearningRateZeroKeepsParameters) {
  const auto data = small_maxcut(6, 7);
  MaxCutProjectionModel model(2, 4, 0.5);
  init_uniform(model.params(), 1, -0.1, 0.1);
  const auto before = model.params().values();
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  const auto st = train(model, std::span<const TrainingExample>(data),
                        DoubleGreedySpec{LinkFunction::softplus_ratio(0.125), std::nullopt}, cfg);
  EXPECT_EQ(model.params().values(), before);
  ASSERT_EQ(st.history.size(), 3u);
  EXPECT_EQ(st.history[0].mean_log_likelihood, st.history[2].mean_log_likelihood);
  EXPECT_EQ(st.step, 6u);
}

TEST(TrainTest, DeterministicAndThreadIndependent) {
  const auto data = small_maxcut(20, 8);
  const AlgorithmSpec spec = DoubleGreedySpec{LinkFunction::softplus_ratio(0.125), std::nullopt};
  std::vector<std::vector<double>> results;
  for (unsigned threads : {1u, 1u, 3u}) {
    MaxCutProjectionModel model(2, 4, 0.5);
    init_uniform(model.params(), 1, -0.1, 0.1);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 6;
    cfg.seed = 9;
    cfg.threads = threads;
    train(model, std::span<const TrainingExample>(data), spec, cfg);
    results.push_back(model.params().values());
  }
  EXPECT_EQ(results[0], results[1]);
  EXPECT_EQ(results[0], results[2]);
}

TEST(TrainTest, ModularSelfConsistency) {
  const std::vector<double> truth{1.5, -1.0, 0.5, -2.0, 0.0, 2.0};
  const auto data = registries_from_modular(truth, 400, 10);
  ModularModel model(truth.size());
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 20;
  cfg.epochs = 5;
  cfg.seed = 11;
  const AlgorithmSpec spec = DoubleGreedySpec{LinkFunction::sigmoid(1.0), std::nullopt};
  const auto st = train(model, std::span<const TrainingExample>(data), spec, cfg);
  for (std::size_t e = 1; e < st.history.size(); ++e) {
    EXPECT_GE(st.history[e].mean_log_likelihood, st.history[e - 1].mean_log_likelihood);
  }
}

TEST(TrainTest, FlidBeatsModularOnPlantedData) {
  std::vector<double> u(8, 1.0), w(8 * 2, 0.0);
  for (std::size_t i = 0; i < 8; ++i) w[i * 2 + i % 2] = 3.0;
  const FlidFn<double> planted(u, w, 2);
  const auto ds = sample_registries(planted, LinkFunction::sigmoid(1.0), ItemOrder::identity(8),
                                    600, 13);
  std::vector<std::size_t> idx(600);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto data = ds.training_examples(idx);
  const AlgorithmSpec spec = DoubleGreedySpec{LinkFunction::sigmoid(1.0), std::nullopt};
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 10;
  cfg.epochs = 8;
  cfg.seed = 14;
  FlidModel flid(8, 2);
  init_uniform(flid.params(), 15, -0.1, 0.1);
  ModularModel modular(8);
  const auto fs = train(flid, std::span<const TrainingExample>(data), spec, cfg);
  const auto ms = train(modular, std::span<const TrainingExample>(data), spec, cfg);
  EXPECT_GT(fs.history.back().mean_log_likelihood, ms.history.back().mean_log_likelihood);
}

}  // namespace
}  // namespace subgrad
