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

#include "subgrad/autodiff.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace subgrad {
namespace {

TEST(VarTest, ConstantsStayOffTape) {
  const Var a = 2.0;
  const Var b = exp(a) * 3.0 + log(Var(4.0));
  EXPECT_TRUE(b.is_constant());
  EXPECT_DOUBLE_EQ(b.value(), 3.0 * std::exp(2.0) + std::log(4.0));
}

TEST(VarTest, ConstantOnlyExpressionHasZeroGradient) {
  Tape tape;
  ParamStore store;
  store.add("w", 2, 1, 0.5);
  tape.bind(store);
  const Var c = Var(1.0) + Var(2.0);
  const auto g = tape.backward(c);
  EXPECT_EQ(g, std::vector<double>(2, 0.0));
}

TEST(TapeTest, ParameterIdsFollowStoreOrder) {
  ParamStore store;
  store.add("a", 1, 2, 1.0);
  store.add("b", 2, 1, 2.0);
  Tape tape;
  const auto p = tape.bind(store);
  ASSERT_EQ(p.size(), 4u);
  // d/dp (a0 + 2 a1 + 3 b0 + 4 b1)
  const Var y = p[0] + scale(p[1], 2.0) + scale(p[2], 3.0) + scale(p[3], 4.0);
  EXPECT_EQ(tape.backward(y), (std::vector<double>{1.0, 2.0, 3.0, 4.0}));
  EXPECT_THROW(tape.bind(store), ConfigError);
}

TEST(TapeTest, ReplayIsBitExact) {
  Tape tape;
  const Var x = tape.parameter(0.3);
  const Var y = tape.parameter(-1.7);
  const Var xs[] = {x, y, x * y};
  const Var z = logsumexp(xs) + log_sigmoid_t(x, y, 0.25) + log_softplus_t(y, 0.125) +
                softplus_t(x, 2.0) / (exp(y) + 1.0) - max_of(std::span<const Var>(xs));
  (void)z;
  const auto replayed = tape.replay();
  ASSERT_EQ(replayed.size(), tape.values().size());
  for (std::size_t i = 0; i < replayed.size(); ++i) EXPECT_EQ(replayed[i], tape.values()[i]);
}

TEST(TapeTest, TopologicalOrder) {
  Tape tape;
  const Var x = tape.parameter(1.0);
  const Var y = exp(x * x) + x;
  for (std::uint32_t id = 0; id <= y.id(); ++id) {
    for (std::uint32_t in : tape.inputs(id)) EXPECT_LT(in, id);
  }
}

TEST(TapeTest, MixingTapesThrows) {
  Tape a, b;
  const Var x = a.parameter(1.0);
  const Var y = b.parameter(2.0);
  EXPECT_THROW(x + y, ConfigError);
}

TEST(OpsTest, DomainErrors) {
  Tape tape;
  const Var zero = tape.parameter(0.0);
  const Var neg = tape.parameter(-1.0);
  EXPECT_THROW(log(zero), DomainError);
  EXPECT_THROW(log(neg), DomainError);
  EXPECT_THROW(Var(1.0) / zero, DomainError);
  EXPECT_THROW(log(0.0), DomainError);
  EXPECT_THROW(max_of(std::span<const Var>()), DomainError);
  EXPECT_THROW(sigmoid_t(1.0, 0.0, 0.0), ConfigError);
  EXPECT_THROW(softplus_t(1.0, -1.0), ConfigError);
}

TEST(OpsTest, SigmoidReference) {
  EXPECT_NEAR(sigmoid_t(1.0, 0.0, 1.0), 0.7310585786300049, 1e-15);
  EXPECT_NEAR(sigmoid_t(3.0, 1.0, 2.0), 0.7310585786300049, 1e-15);
  EXPECT_NEAR(std::exp(log_sigmoid_t(1.0, 0.0, 1.0)), 0.7310585786300049, 1e-15);
}

TEST(OpsTest, SoftplusStableForLargeArguments) {
  EXPECT_NEAR(softplus_t(800.0, 1.0), 800.0, 1e-12);
  EXPECT_GT(softplus_t(-800.0, 1.0), -1.0);
  // log(t log(1 + e^{a/t})) ~ log t + a/t as a/t -> -inf.
  const double v = log_softplus_t(-40.0, 0.5);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, std::log(0.5) - 80.0, 1e-9);
  EXPECT_NEAR(log_sigmoid_t(-1000.0, 0.0, 1.0), -1000.0, 1e-9);
}

TEST(OpsTest, MaxGradientGoesToLowestArgmax) {
  Tape tape;
  const Var a = tape.parameter(2.0);
  const Var b = tape.parameter(2.0);
  const Var c = tape.parameter(1.0);
  const Var xs[] = {a, b, c};
  const Var m = max_of(std::span<const Var>(xs));
  tape.backward(m);
  EXPECT_EQ(tape.adjoint(a), 1.0);
  EXPECT_EQ(tape.adjoint(b), 0.0);
  EXPECT_EQ(tape.adjoint(c), 0.0);
}

// f(x) = log(sigmoid(softplus(x0)*x1 - x2)) + logsumexp(x) + sum(x) / dot(x, x)
template <Scalar T>
T composite(const std::vector<T>& x) {
  const std::span<const T> xs(x);
  const T a = softplus_t(x[0], 0.7) * x[1];
  return log_sigmoid_t(a, x[2], 0.3) + logsumexp(xs) + sum(xs) / dot(xs, xs) +
         log_softplus_t(x[1] - x[0], 0.25) + exp(scale(x[2], -0.5)) +
         sigmoid_t(x[0], x[2], 1.5) - max2(x[0], x[1]);
}

TEST(OpsTest, GradientsMatchFiniteDifferences) {
  Rng rng = stream_rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x0(3);
    for (double& v : x0) v = 4.0 * uniform01(rng) - 2.0;
    if (std::fabs(x0[0] - x0[1]) < 1e-3) continue;  // max kink
    Tape tape;
    std::vector<Var> x;
    for (double v : x0) x.push_back(tape.parameter(v));
    const Var y = composite(x);
    EXPECT_NEAR(y.value(), composite(x0), 1e-12);
    tape.backward(y);
    std::vector<double> ad;
    for (const Var& v : x) ad.push_back(tape.adjoint(v));
    const auto fd = testing::finite_difference(
        [](const std::vector<double>& p) { return composite(p); }, x0);
    EXPECT_LT(testing::relative_error(ad, fd), 1e-6) << "trial " << trial;
  }
}

TEST(OpsTest, MatvecMatchesDot) {
  const std::vector<double> m{1, 2, 3, 4, 5, 6};
  const std::vector<double> x{1, -1, 2};
  const auto y = matvec<double>(m, 2, 3, x);
  EXPECT_EQ(y, (std::vector<double>{5.0, 11.0}));
  EXPECT_THROW(matvec<double>(m, 3, 3, x), ConfigError);
}

TEST(ParamStoreTest, Layout) {
  ParamStore s;
  const auto& a = s.add("a", 2, 3);
  EXPECT_EQ(a.index(1, 2), 5u);
  s.add("b", 1, 1, 7.0);
  EXPECT_EQ(s.find("b").offset, 6u);
  EXPECT_EQ(s.values("b")[0], 7.0);
  EXPECT_THROW(s.add("a", 1, 1), ConfigError);
  EXPECT_THROW(s.find("c"), ConfigError);
  EXPECT_EQ(s.size(), 7u);
}

}  // namespace
}  // namespace subgrad
