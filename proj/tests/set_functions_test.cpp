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

#include "subgrad/set_functions.hpp"

#include <vector>

#include <gtest/gtest.h>

#include "subgrad/data.hpp"
#include "subgrad/oracle.hpp"
#include "test_util.hpp"

namespace subgrad {
namespace {

CutFn<double> fixture_cut() {
  return CutFn<double>(4, {0, 1, 2, 0,  //
                           1, 0, 0.25, 0.5,  //
                           2, 0.25, 0, 1.5,  //
                           0, 0.5, 1.5, 0});
}

FlidFn<double> fixture_flid() {
  return FlidFn<double>({1.0, -0.5, 0.3}, {1, 0, 0.5, 2, 0, 1}, 2);
}

TEST(SubsetTest, Basics) {
  Subset s = Subset::from_items(6, {5, 0, 2});
  EXPECT_EQ(s.count(), 3u);
  EXPECT_EQ(s.to_string(), "{0 2 5}");
  EXPECT_EQ(s.items(), (std::vector<std::size_t>{0, 2, 5}));
  EXPECT_TRUE(s.with(1).contains(1));
  EXPECT_FALSE(s.without(0).contains(0));
  EXPECT_EQ(s.complement().count(), 3u);
  EXPECT_TRUE(Subset::from_items(6, {0}).is_subset_of(s));
  EXPECT_THROW(s.insert(6), std::out_of_range);
  EXPECT_EQ(Subset::from_mask(6, s.mask()), s);
  EXPECT_TRUE(lex_less(Subset::from_items(3, {0, 2}), Subset::from_items(3, {1})));
}

TEST(CutFnTest, FixtureValues) {
  const auto f = fixture_cut();
  EXPECT_EQ(f.evaluate(Subset(4)), 0.0);
  EXPECT_EQ(f.evaluate(Subset::full(4)), 0.0);
  EXPECT_DOUBLE_EQ(f.evaluate(Subset::from_items(4, {0, 3})), 5.0);
  EXPECT_DOUBLE_EQ(f.evaluate(Subset::from_items(4, {1, 2})), 5.0);
  EXPECT_DOUBLE_EQ(f.degree(2), 3.75);
}

TEST(CutFnTest, Validation) {
  EXPECT_THROW(CutFn<double>(2, {1, 0, 0, 0}), ConfigError);
  EXPECT_THROW(CutFn<double>(2, {0, 1, 2, 0}), ConfigError);
  EXPECT_THROW(CutFn<double>(2, {0, -1, -1, 0}), ConfigError);
  EXPECT_THROW(CutFn<double>(2, {0, 1, 1}), ConfigError);
  EXPECT_THROW(fixture_cut().evaluate(Subset(3)), ConfigError);
}

TEST(FlidFnTest, FixtureValues) {
  const auto f = fixture_flid();
  EXPECT_EQ(f.evaluate(Subset(3)), 0.0);
  EXPECT_NEAR(f.evaluate(Subset::from_items(3, {0, 1})), 0.0, 1e-15);
  EXPECT_NEAR(f.evaluate(Subset::from_items(3, {0, 1, 2})), -0.70000000000000001, 1e-15);
  EXPECT_NEAR(f.evaluate(Subset::from_items(3, {1, 2})), -1.2, 1e-15);
  EXPECT_THROW(FlidFn<double>({1.0}, {-0.1}, 1), ConfigError);
}

TEST(FacilityLocationTest, EmptyIsZero) {
  const FacilityLocationFn<double> f({3, 1, 2});
  EXPECT_EQ(f.evaluate(Subset(3)), 0.0);
  EXPECT_EQ(f.evaluate(Subset::from_items(3, {1, 2})), 2.0);
}

TEST(ToyFnTest, Values) {
  const OrderingToyFn<double> f;
  EXPECT_EQ(f.evaluate(Subset(2)), 2.0);
  EXPECT_EQ(f.evaluate(Subset::from_items(2, {0})), 3.0);
  EXPECT_EQ(f.evaluate(Subset::from_items(2, {1})), 2.0);
  EXPECT_EQ(f.evaluate(Subset::full(2)), 0.0);
}

TEST(GainTest, MembershipChecked) {
  const auto f = fixture_cut();
  EXPECT_THROW(gain_add(f, 0, Subset::from_items(4, {0})), ConfigError);
  EXPECT_THROW(gain_remove(f, 0, Subset(4)), ConfigError);
  EXPECT_DOUBLE_EQ(gain_add(f, 0, Subset(4)), 3.0);
}

TEST(ShiftTest, MakesNonNegative) {
  const auto g = shift_to_nonnegative(fixture_flid());
  EXPECT_DOUBLE_EQ(g.shift(), -1.2);  // the subtracted minimum
  for (const auto& s : testing::all_subsets(3)) EXPECT_GE(g.evaluate(s), 0.0);
}

TEST(ZooTest, SubmodularOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = stream_rng(seed, 1);
    EXPECT_TRUE(check_submodular(random_cut(8, rng)).submodular);
    EXPECT_TRUE(check_submodular(random_flid(8, 3, rng)).submodular);
    EXPECT_TRUE(check_submodular(random_modular(8, rng)).submodular);
    std::vector<double> w(8);
    for (double& v : w) v = uniform01(rng);
    EXPECT_TRUE(check_submodular(FacilityLocationFn<double>(w)).submodular);
  }
}

// Every reachable decision prefix for a random order.
template <SetFunction F>
void expect_gain_streams_agree(const F& f, Rng& rng) {
  std::vector<std::size_t> order(f.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<bool> decisions(f.size());
    for (std::size_t i = 0; i < decisions.size(); ++i) decisions[i] = uniform01(rng) < 0.5;
    const auto fast = incremental_gains(f, order, decisions);
    const auto slow = naive_gains(f, order, decisions);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      EXPECT_NEAR(value_of(fast[i].first), value_of(slow[i].first), 1e-12);
      EXPECT_NEAR(value_of(fast[i].second), value_of(slow[i].second), 1e-12);
    }
  }
}

TEST(GainEngineTest, IncrementalMatchesNaive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = stream_rng(seed, 2);
    expect_gain_streams_agree(random_cut(9, rng), rng);
    expect_gain_streams_agree(random_flid(9, 4, rng), rng);
    expect_gain_streams_agree(random_modular(9, rng), rng);
    std::vector<double> w(9);
    for (double& v : w) v = uniform01(rng);
    expect_gain_streams_agree(FacilityLocationFn<double>(w), rng);
    expect_gain_streams_agree(shift_to_nonnegative(random_flid(7, 2, rng)), rng);
  }
}

TEST(GainEngineTest, FacilityLocationStream) {
  // a-stream 3, 2, 0 for weights (3, 5, 5) and all-include decisions.
  const FacilityLocationFn<double> f({3, 5, 5});
  const std::vector<std::size_t> order{0, 1, 2};
  const auto g = incremental_gains(f, order, {true, true, true});
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0].first, 3.0);
  EXPECT_EQ(g[1].first, 2.0);
  EXPECT_EQ(g[2].first, 0.0);
}

TEST(GainEngineTest, InvalidOrderRejected) {
  const auto f = fixture_cut();
  const std::vector<std::size_t> dup{0, 1, 1, 3};
  EXPECT_THROW(DoubleGreedyWalk<CutFn<double>>(f, dup), ConfigError);
  const std::vector<std::size_t> short_order{0, 1};
  EXPECT_THROW(DoubleGreedyWalk<CutFn<double>>(f, short_order), ConfigError);
}

template <SetFunction F>
void expect_greedy_gains_agree(const F& f, Rng& rng) {
  GreedyEngine<F> engine(f);
  Subset s(f.size());
  std::vector<std::size_t> order(f.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);
  for (std::size_t step = 0; step + 1 < f.size(); ++step) {
    for (std::size_t e = 0; e < f.size(); ++e) {
      if (s.contains(e)) continue;
      EXPECT_NEAR(value_of(engine.gain(e)), value_of(gain_add(f, e, s)), 1e-12);
    }
    engine.add(order[step]);
    s.insert(order[step]);
  }
}

TEST(GreedyEngineTest, IncrementalMatchesNaive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = stream_rng(seed, 3);
    expect_greedy_gains_agree(random_cut(8, rng), rng);
    expect_greedy_gains_agree(random_flid(8, 3, rng), rng);
    expect_greedy_gains_agree(random_modular(8, rng), rng);
    std::vector<double> w(8);
    for (double& v : w) v = uniform01(rng);
    expect_greedy_gains_agree(FacilityLocationFn<double>(w), rng);
  }
}

TEST(CallableFnTest, WrapsLambda) {
  const CallableFn<double> f(3, [](const Subset& s) { return static_cast<double>(s.count()); });
  EXPECT_EQ(f.evaluate(Subset::full(3)), 3.0);
}

}  // namespace
}  // namespace subgrad
