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

#pragma once

// Probabilistic differentiable double greedy for unconstrained maximization.
//
// Items are visited in a fixed order. For item e_i with
//   a_i = Delta+(e_i | X_{i-1}),  b_i = Delta-(e_i | Y_{i-1})
// the item joins X with probability g(a_i, b_i) and otherwise leaves Y. The
// induced set distribution is
//   P(X) = prod_i g(a_i, b_i)^{x_i} (1 - g(a_i, b_i))^{1 - x_i}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subgrad/autodiff.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/random.hpp"
#include "subgrad/set_functions.hpp"
#include "subgrad/subset.hpp"

namespace subgrad {

enum class LinkKind {
  kHard,           // g1 = 1{a >= b}
  kRatio,          // g2 = [a]+ / ([a]+ + [b]+)
  kSigmoid,        // g3 = sigmoid((a - b) / t)
  kSoftplusRatio,  // g4 = a' / (a' + b'), a' = t log(1 + exp(a / t))
};

class LinkFunction {
 public:
  static LinkFunction hard() { return LinkFunction(LinkKind::kHard, 0.0); }
  static LinkFunction ratio() { return LinkFunction(LinkKind::kRatio, 0.0); }
  static LinkFunction sigmoid(double t) {
    detail::require_temperature(t);
    return LinkFunction(LinkKind::kSigmoid, t);
  }
  static LinkFunction softplus_ratio(double t) {
    detail::require_temperature(t);
    return LinkFunction(LinkKind::kSoftplusRatio, t);
  }

  // "g1".."g4"; `t` is ignored for g1 and g2.
  static LinkFunction parse(std::string_view name, double t) {
    if (name == "g1" || name == "hard") return hard();
    if (name == "g2" || name == "ratio") return ratio();
    if (name == "g3" || name == "sigmoid") return sigmoid(t);
    if (name == "g4" || name == "softplus") return softplus_ratio(t);
    throw ConfigError("unknown link function '" + std::string(name) + "'");
  }

  LinkKind kind() const { return kind_; }
  double temperature() const { return t_; }
  bool differentiable() const {
    return kind_ == LinkKind::kSigmoid || kind_ == LinkKind::kSoftplusRatio;
  }

  std::string name() const {
    switch (kind_) {
      case LinkKind::kHard:
        return "g1";
      case LinkKind::kRatio:
        return "g2";
      case LinkKind::kSigmoid:
        return "g3";
      case LinkKind::kSoftplusRatio:
        return "g4";
    }
    return "?";
  }

  // Inclusion probability g(a, b) in [0, 1].
  template <Scalar T>
  T probability(const T& a, const T& b) const {
    switch (kind_) {
      case LinkKind::kHard:
        return T(value_of(a) >= value_of(b) ? 1.0 : 0.0);
      case LinkKind::kRatio: {
        const double pa = std::max(value_of(a), 0.0);
        const double pb = std::max(value_of(b), 0.0);
        return T(pa + pb == 0.0 ? 0.5 : pa / (pa + pb));
      }
      case LinkKind::kSigmoid:
        return sigmoid_t(a, b, t_);
      case LinkKind::kSoftplusRatio:
        // a' / (a' + b') = sigmoid(log a' - log b').
        return sigmoid_t(log_softplus_t(a, t_), log_softplus_t(b, t_), 1.0);
    }
    return T(0.0);
  }

  // (log g, log(1 - g)). Finite for the smooth links; the hard links yield
  // -inf for impossible decisions and carry no gradient.
  template <Scalar T>
  std::pair<T, T> log_probabilities(const T& a, const T& b) const {
    switch (kind_) {
      case LinkKind::kSigmoid:
        return {log_sigmoid_t(a, b, t_), log_sigmoid_t(b, a, t_)};
      case LinkKind::kSoftplusRatio: {
        const T la = log_softplus_t(a, t_);
        const T lb = log_softplus_t(b, t_);
        return {log_sigmoid_t(la, lb, 1.0), log_sigmoid_t(lb, la, 1.0)};
      }
      default: {
        const double p = value_of(probability(a, b));
        return {T(log_or_neg_inf(p)), T(log_or_neg_inf(1.0 - p))};
      }
    }
  }

  // Deterministic decision g(a, b) >= 1/2, evaluated on the gains directly so
  // that g3 and g4 agree with g1 (ties include).
  bool map_include(double a, double b) const {
    if (kind_ == LinkKind::kRatio) return std::max(a, 0.0) >= std::max(b, 0.0);
    return a >= b;
  }

 private:
  LinkFunction(LinkKind kind, double t) : kind_(kind), t_(t) {}

  static double log_or_neg_inf(double p) {
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  }

  LinkKind kind_;
  double t_;
};

enum class OrderSource { kIdentity, kByFrequency, kExplicit };

// A permutation of the ground set fixing the double-greedy visiting order.
class ItemOrder {
 public:
  ItemOrder() = default;

  static ItemOrder identity(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return ItemOrder(std::move(p), OrderSource::kIdentity);
  }

  static ItemOrder explicit_order(std::vector<std::size_t> perm) {
    detail::check_permutation(perm, perm.size());
    return ItemOrder(std::move(perm), OrderSource::kExplicit);
  }

  // Descending frequency, ties by ascending id.
  static ItemOrder by_frequency(std::span<const std::size_t> counts) {
    std::vector<std::size_t> p(counts.size());
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::stable_sort(p.begin(), p.end(), [&](std::size_t a, std::size_t b) {
      return counts[a] > counts[b];
    });
    return ItemOrder(std::move(p), OrderSource::kByFrequency);
  }

  std::size_t size() const { return perm_.size(); }
  const std::vector<std::size_t>& items() const { return perm_; }
  std::size_t operator[](std::size_t pos) const { return perm_.at(pos); }
  OrderSource source() const { return source_; }

  friend bool operator==(const ItemOrder& a, const ItemOrder& b) {
    return a.perm_ == b.perm_;
  }

 private:
  ItemOrder(std::vector<std::size_t> perm, OrderSource source)
      : perm_(std::move(perm)), source_(source) {}

  std::vector<std::size_t> perm_;
  OrderSource source_ = OrderSource::kIdentity;
};

inline std::string to_string(OrderSource s) {
  switch (s) {
    case OrderSource::kIdentity:
      return "identity";
    case OrderSource::kByFrequency:
      return "by-empirical-frequency";
    case OrderSource::kExplicit:
      return "explicit";
  }
  return "?";
}

struct DoubleGreedyStep {
  std::size_t item = 0;
  double gain_add = 0.0;     // a_i
  double gain_remove = 0.0;  // b_i
  double include_probability = 0.0;
  bool included = false;
  Subset inner;  // X_i
  Subset outer;  // Y_i
};

using StepTrace = std::vector<DoubleGreedyStep>;

struct DoubleGreedyResult {
  Subset set;
  StepTrace trace;
};

namespace detail {

template <SetFunction F, class Decide>
DoubleGreedyResult run_double_greedy(const F& f, const LinkFunction& g,
                                     const ItemOrder& order, bool keep_trace,
                                     Decide&& decide) {
  DoubleGreedyWalk<F> walk(f, order.items());
  DoubleGreedyResult out;
  if (keep_trace) out.trace.reserve(f.size());
  while (!walk.done()) {
    const std::size_t e = walk.next_item();
    const auto& [a, b] = walk.gains();
    const double av = value_of(a);
    const double bv = value_of(b);
    const double p = g.probability(av, bv);
    const bool include = decide(av, bv, p);
    walk.decide(include);
    if (keep_trace) {
      out.trace.push_back(DoubleGreedyStep{e, av, bv, p, include, walk.inner(),
                                           walk.outer()});
    }
  }
  out.set = walk.inner();
  return out;
}

}  // namespace detail

// Draws X ~ P(X): item i is included iff g(a_i, b_i) >= U with U uniform on
// (0, 1].
template <SetFunction F, class Urbg>
DoubleGreedyResult sample(const F& f, const LinkFunction& g, const ItemOrder& order,
                          Urbg& rng, bool keep_trace = true) {
  return detail::run_double_greedy(
      f, g, order, keep_trace,
      [&](double, double, double p) { return p >= uniform01_open_low(rng); });
}

// Deterministic execution: include iff g(a_i, b_i) >= 1/2.
template <SetFunction F>
DoubleGreedyResult map_execute(const F& f, const LinkFunction& g,
                               const ItemOrder& order) {
  return detail::run_double_greedy(
      f, g, order, true, [&](double a, double b, double) { return g.map_include(a, b); });
}

// log P(X), differentiable in f's parameters for g3 and g4. Returns -inf
// (never throws) when a hard link makes X impossible.
template <SetFunction F>
typename F::scalar_type log_likelihood(const F& f, const LinkFunction& g,
                                       const ItemOrder& order, const Subset& x) {
  using T = typename F::scalar_type;
  detail::check_ground(f.size(), x);
  DoubleGreedyWalk<F> walk(f, order.items());
  std::vector<T> terms;
  terms.reserve(f.size());
  while (!walk.done()) {
    const bool include = x.contains(walk.next_item());
    const auto& [a, b] = walk.gains();
    auto [log_in, log_out] = g.log_probabilities(a, b);
    terms.push_back(include ? log_in : log_out);
    walk.decide(include);
  }
  return sum(std::span<const T>(terms));
}

// `runs` independent samples; run r uses stream_rng(seed, r), so the result
// is independent of `threads`.
template <SetFunction F>
std::vector<Subset> sample_many(const F& f, const LinkFunction& g,
                                const ItemOrder& order, std::uint64_t seed,
                                std::size_t runs, unsigned threads = 1) {
  std::vector<Subset> out(runs);
  parallel_for(runs, threads, [&](std::size_t r) {
    Rng rng = stream_rng(seed, r);
    out[r] = sample(f, g, order, rng, false).set;
  });
  return out;
}

}  // namespace subgrad
