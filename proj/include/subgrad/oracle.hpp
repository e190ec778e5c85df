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

// Exhaustive ground truth at desk scale: exact maximizers, exact induced
// distributions, submodularity checks, the Lambert-W constant, and
// Monte-Carlo checks of the smoothed double-greedy approximation bounds.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "subgrad/double_greedy.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/greedy.hpp"
#include "subgrad/random.hpp"
#include "subgrad/set_functions.hpp"
#include "subgrad/subset.hpp"

namespace subgrad {

inline constexpr std::size_t kMaxBruteForceItems = 22;
inline constexpr std::uint64_t kMaxBruteForceCombinations = 1'000'000;
inline constexpr std::size_t kMaxEnumerateItems = 12;
inline constexpr std::uint64_t kMaxEnumerateSequences = 1'000'000;
inline constexpr std::size_t kMaxSubmodularCheckItems = 14;

struct MaxResult {
  Subset set;
  double value = 0.0;
};

namespace detail {

template <class F>
struct is_cut : std::false_type {};
template <Scalar T>
struct is_cut<CutFn<T>> : std::true_type {};

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (std::uint64_t{1} << 62)) return std::numeric_limits<std::uint64_t>::max();
  }
  return r;
}

inline std::uint64_t falling_factorial(std::size_t n, std::size_t k) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < k; ++i) {
    r *= (n - i);
    if (r > (std::uint64_t{1} << 62)) return std::numeric_limits<std::uint64_t>::max();
  }
  return r;
}

}  // namespace detail

// Exact maximizer over all subsets, or over all subsets of size k. Ties go to
// the lexicographically smallest item list. Cut functions only enumerate sets
// containing item 0 (plus the empty set), since f(S) = f(V \ S).
template <SetFunction F>
MaxResult brute_force_max(const F& f, std::optional<std::size_t> k = std::nullopt) {
  const std::size_t n = f.size();
  MaxResult best;
  bool have = false;
  auto consider = [&](Subset s) {
    const double v = value_of(f.evaluate(s));
    if (!have || v > best.value || (v == best.value && lex_less(s, best.set))) {
      best.set = std::move(s);
      best.value = v;
      have = true;
    }
  };
  if (!k) {
    if (n > kMaxBruteForceItems) {
      throw PreconditionError("brute_force_max: n = " + std::to_string(n) +
                              " exceeds " + std::to_string(kMaxBruteForceItems));
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t m = 0; m < total; ++m) {
      if constexpr (detail::is_cut<F>::value) {
        if (m != 0 && (m & 1U) == 0) continue;
      }
      consider(Subset::from_mask(n, m));
    }
    return best;
  }
  detail::check_cardinality(*k, n);
  if (detail::binomial(n, *k) > kMaxBruteForceCombinations) {
    throw PreconditionError("brute_force_max: C(n, k) exceeds " +
                            std::to_string(kMaxBruteForceCombinations));
  }
  // Combinations in lexicographic order; the first maximum wins.
  std::vector<std::size_t> idx(*k);
  for (std::size_t i = 0; i < *k; ++i) idx[i] = i;
  while (true) {
    Subset s = Subset::from_items(n, idx);
    const double v = value_of(f.evaluate(s));
    if (!have || v > best.value) {
      best.set = std::move(s);
      best.value = v;
      have = true;
    }
    std::size_t i = *k;
    while (i > 0 && idx[i - 1] == n - *k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < *k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

struct DistributionEntry {
  Subset set;
  double probability = 0.0;
};

struct SequenceEntry {
  Sequence sequence;
  double probability = 0.0;
};

namespace detail {

template <SetFunction F>
void branch_double_greedy(DoubleGreedyWalk<F> walk, const LinkFunction& g, double p,
                          std::vector<double>& by_mask) {
  if (walk.done()) {
    by_mask[walk.inner().mask()] += p;
    return;
  }
  const auto& [a, b] = walk.gains();
  const double q = g.probability(value_of(a), value_of(b));
  if (q > 0.0) {
    DoubleGreedyWalk<F> in = walk;
    in.decide(true);
    branch_double_greedy(std::move(in), g, p * q, by_mask);
  }
  if (q < 1.0) {
    walk.decide(false);
    branch_double_greedy(std::move(walk), g, p * (1.0 - q), by_mask);
  }
}

template <SetFunction F>
void branch_greedy(const GreedyEngine<F>& engine, std::size_t n, std::size_t k, double t,
                   Sequence& prefix, double p, std::vector<SequenceEntry>& out) {
  if (prefix.size() == k) {
    out.push_back({prefix, p});
    return;
  }
  std::vector<std::size_t> cand;
  std::vector<double> w;
  for (std::size_t e = 0; e < n; ++e) {
    if (engine.selected().contains(e)) continue;
    cand.push_back(e);
    w.push_back(value_of(engine.gain(e)) / t);
  }
  const double m = *std::max_element(w.begin(), w.end());
  double total = 0.0;
  for (double& x : w) {
    x = std::exp(x - m);
    total += x;
  }
  for (std::size_t j = 0; j < cand.size(); ++j) {
    GreedyEngine<F> next = engine;
    next.add(cand[j]);
    prefix.push_back(cand[j]);
    branch_greedy(next, n, k, t, prefix, p * (w[j] / total), out);
    prefix.pop_back();
  }
}

}  // namespace detail

// P(X) for every subset (indexed by mask), obtained by branching on both
// outcomes of every double-greedy decision.
template <SetFunction F>
std::vector<DistributionEntry> enumerate_double_greedy(const F& f, const LinkFunction& g,
                                                       const ItemOrder& order) {
  const std::size_t n = f.size();
  if (n > kMaxEnumerateItems) {
    throw PreconditionError("enumerate: n = " + std::to_string(n) + " exceeds " +
                            std::to_string(kMaxEnumerateItems));
  }
  std::vector<double> by_mask(std::size_t{1} << n, 0.0);
  detail::branch_double_greedy(DoubleGreedyWalk<F>(f, order.items()), g, 1.0, by_mask);
  std::vector<DistributionEntry> out;
  out.reserve(by_mask.size());
  for (std::uint64_t m = 0; m < by_mask.size(); ++m) {
    out.push_back({Subset::from_mask(n, m), by_mask[m]});
  }
  return out;
}

// P(sigma) for every ordered k-tuple, by branching over every softmax draw.
template <SetFunction F>
std::vector<SequenceEntry> enumerate_sequences(const F& f, std::size_t k, double t) {
  const std::size_t n = f.size();
  detail::check_cardinality(k, n);
  detail::require_temperature(t);
  if (detail::falling_factorial(n, k) > kMaxEnumerateSequences) {
    throw PreconditionError("enumerate: more than " +
                            std::to_string(kMaxEnumerateSequences) + " sequences");
  }
  std::vector<SequenceEntry> out;
  Sequence prefix;
  detail::branch_greedy(GreedyEngine<F>(f), n, k, t, prefix, 1.0, out);
  return out;
}

// P(S) for every k-subset, summing the enumerated sequence probabilities.
// Entries are ordered by mask.
template <SetFunction F>
std::vector<DistributionEntry> enumerate_greedy(const F& f, std::size_t k, double t) {
  const std::size_t n = f.size();
  if (n > 64) throw PreconditionError("enumerate: n > 64");
  std::map<std::uint64_t, double> by_mask;
  for (const auto& s : enumerate_sequences(f, k, t)) {
    by_mask[Subset::from_items(n, s.sequence).mask()] += s.probability;
  }
  std::vector<DistributionEntry> out;
  out.reserve(by_mask.size());
  for (const auto& [m, p] : by_mask) out.push_back({Subset::from_mask(n, m), p});
  return out;
}

struct SubmodularityWitness {
  std::size_t item = 0;
  Subset smaller;  // A
  Subset larger;   // B, A subset of B, item not in B
  double gain_smaller = 0.0;
  double gain_larger = 0.0;
};

struct SubmodularityReport {
  bool submodular = true;
  std::optional<SubmodularityWitness> witness;
};

// Checks f(A + e) - f(A) >= f(B + e) - f(B) for all e and A subset of B
// subset of V \ {e}, up to a relative tolerance.
template <SetFunction F>
SubmodularityReport check_submodular(const F& f, double tol = 1e-9) {
  const std::size_t n = f.size();
  if (n > kMaxSubmodularCheckItems) {
    throw PreconditionError("check_submodular: n = " + std::to_string(n) + " exceeds " +
                            std::to_string(kMaxSubmodularCheckItems));
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> table(total);
  for (std::uint64_t m = 0; m < total; ++m) {
    table[m] = value_of(f.evaluate(Subset::from_mask(n, m)));
  }
  for (std::size_t e = 0; e < n; ++e) {
    const std::uint64_t bit = std::uint64_t{1} << e;
    const std::uint64_t others = (total - 1) & ~bit;
    // B ranges over subsets of `others`, A over subsets of B.
    for (std::uint64_t b = others;; b = (b - 1) & others) {
      const double gain_b = table[b | bit] - table[b];
      for (std::uint64_t a = b;; a = (a - 1) & b) {
        const double gain_a = table[a | bit] - table[a];
        if (gain_a < gain_b - tol * (1.0 + std::abs(gain_a) + std::abs(gain_b))) {
          return {false, SubmodularityWitness{e, Subset::from_mask(n, a),
                                              Subset::from_mask(n, b), gain_a, gain_b}};
        }
        if (a == 0) break;
      }
      if (b == 0) break;
    }
  }
  return {true, std::nullopt};
}

// Principal branch of the Lambert W function (w e^w = x) for x >= -1/e.
inline double lambert_w(double x) {
  const double branch_point = -std::exp(-1.0);
  if (x < branch_point) throw DomainError("lambert_w: x < -1/e");
  if (x == 0.0) return 0.0;
  double w = x < 1.0 ? std::log1p(x) : std::log(x) - std::log(std::log(x) + 1.0);
  if (x < -0.3) w = -1.0 + std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
  for (int i = 0; i < 100; ++i) {
    const double ew = std::exp(w);
    const double step = (w * ew - x) / (ew * (w + 1.0));
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

// W(1/e) = 0.27846454276107...
inline double lambert_w_inv_e() {
  static const double w = lambert_w(std::exp(-1.0));
  return w;
}

enum class Theorem {
  kHalf,   // softplus-ratio link: E f(X) >= OPT / 2 - eps for t < 2 eps / (n ln 2)
  kThird,  // sigmoid link: E f(X) >= OPT / 3 - eps for t < 3 eps / (n W(1/e))
};

struct GuaranteeConfig {
  Theorem theorem = Theorem::kHalf;
  // Absolute epsilon, or a fraction of OPT when epsilon_relative is set.
  double epsilon = 0.05;
  bool epsilon_relative = true;
  std::size_t num_runs = 20'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // t is set to this fraction of the theorem's strict upper bound.
  double temperature_fraction = 0.9;
};

struct GuaranteeReport {
  Theorem theorem = Theorem::kHalf;
  std::size_t n = 0;
  std::size_t runs = 0;
  double opt_value = 0.0;
  double epsilon = 0.0;
  double temperature_bound = 0.0;
  double temperature = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double bound = 0.0;  // OPT / 2 - eps or OPT / 3 - eps
  bool pass = false;
};

inline double guarantee_temperature_bound(Theorem th, double epsilon, std::size_t n) {
  const double nn = static_cast<double>(n);
  return th == Theorem::kHalf ? 2.0 * epsilon / (nn * std::log(2.0))
                              : 3.0 * epsilon / (nn * lambert_w_inv_e());
}

// Monte-Carlo check of the approximation bound: pass iff mean + 3 SE >= bound.
// Precondition failures (negative values, non-submodularity) throw
// PreconditionError instead of reporting a failed guarantee.
template <SetFunction F>
GuaranteeReport verify_guarantee(const F& f, const GuaranteeConfig& cfg) {
  const std::size_t n = f.size();
  if (cfg.num_runs < 10'000) throw ConfigError("verify_guarantee needs num_runs >= 10000");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("verify_guarantee needs epsilon > 0");
  if (!(cfg.temperature_fraction > 0.0 && cfg.temperature_fraction < 1.0)) {
    throw ConfigError("temperature fraction must lie in (0, 1)");
  }
  if (n > kMaxSubmodularCheckItems) {
    throw PreconditionError("verify_guarantee: n too large for exhaustive preconditions");
  }
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (value_of(f.evaluate(Subset::from_mask(n, m))) < 0.0) {
      throw PreconditionError("verify_guarantee: f is negative on " +
                              Subset::from_mask(n, m).to_string() +
                              "; shift it to be non-negative first");
    }
  }
  const auto sub = check_submodular(f);
  if (!sub.submodular) {
    throw PreconditionError("verify_guarantee: f is not submodular (item " +
                            std::to_string(sub.witness->item) + ", A = " +
                            sub.witness->smaller.to_string() + ", B = " +
                            sub.witness->larger.to_string() + ")");
  }

  GuaranteeReport rep;
  rep.theorem = cfg.theorem;
  rep.n = n;
  rep.runs = cfg.num_runs;
  rep.opt_value = brute_force_max(f).value;
  rep.epsilon = cfg.epsilon_relative ? cfg.epsilon * rep.opt_value : cfg.epsilon;
  if (!(rep.epsilon > 0.0)) {
    throw PreconditionError("verify_guarantee: OPT is zero, relative epsilon vanishes");
  }
  rep.temperature_bound = guarantee_temperature_bound(cfg.theorem, rep.epsilon, n);
  rep.temperature = cfg.temperature_fraction * rep.temperature_bound;
  const LinkFunction g = cfg.theorem == Theorem::kHalf
                             ? LinkFunction::softplus_ratio(rep.temperature)
                             : LinkFunction::sigmoid(rep.temperature);
  const auto order = ItemOrder::identity(n);

  std::vector<double> values(cfg.num_runs);
  parallel_for(cfg.num_runs, cfg.threads, [&](std::size_t r) {
    Rng rng = stream_rng(cfg.seed, r);
    values[r] = value_of(f.evaluate(sample(f, g, order, rng, false).set));
  });
  double total = 0.0;
  for (double v : values) total += v;
  const double runs = static_cast<double>(cfg.num_runs);
  rep.mean = total / runs;
  double ss = 0.0;
  for (double v : values) ss += (v - rep.mean) * (v - rep.mean);
  rep.std_error = std::sqrt(ss / (runs - 1.0) / runs);
  const double fraction = cfg.theorem == Theorem::kHalf ? 0.5 : 1.0 / 3.0;
  rep.bound = fraction * rep.opt_value - rep.epsilon;
  rep.pass = rep.mean + 3.0 * rep.std_error >= rep.bound;
  return rep;
}

}  // namespace subgrad
