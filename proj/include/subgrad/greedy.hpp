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

// Probabilistic differentiable greedy for cardinality-constrained
// maximization. Each of k steps draws an unselected item with probability
// softmax(Delta+(e | X) / t), which induces a distribution over sequences;
// a set's probability sums the probabilities of its orderings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "subgrad/autodiff.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/random.hpp"
#include "subgrad/set_functions.hpp"
#include "subgrad/subset.hpp"

namespace subgrad {

using Sequence = std::vector<std::size_t>;

struct SetLikelihoodMode {
  enum class Kind { kExact, kGreedyPerm, kRandomPerm };

  Kind kind = Kind::kExact;
  // RandomPerm: number of sampled orderings, and whether to average their
  // log-probabilities (biased in log space, the default) or their
  // probabilities.
  std::size_t num_samples = 120;
  bool log_space = true;
  // Exact refuses sets larger than this.
  std::size_t exact_threshold = 7;

  static SetLikelihoodMode exact(std::size_t threshold = 7) {
    return {Kind::kExact, 120, true, threshold};
  }
  static SetLikelihoodMode greedy_perm() { return {Kind::kGreedyPerm, 120, true, 7}; }
  static SetLikelihoodMode random_perm(std::size_t samples = 120, bool log_space = true) {
    return {Kind::kRandomPerm, samples, log_space, 7};
  }
};

inline std::string to_string(SetLikelihoodMode::Kind k) {
  switch (k) {
    case SetLikelihoodMode::Kind::kExact:
      return "exact";
    case SetLikelihoodMode::Kind::kGreedyPerm:
      return "greedy-perm";
    case SetLikelihoodMode::Kind::kRandomPerm:
      return "random-perm";
  }
  return "?";
}

namespace detail {

inline void check_cardinality(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) {
    throw ConfigError("cardinality k = " + std::to_string(k) +
                      " outside [1, " + std::to_string(n) + "]");
  }
}

inline void check_sequence(std::span<const std::size_t> seq, std::size_t n) {
  if (seq.size() > n) throw ConfigError("sequence longer than the ground set");
  std::vector<char> seen(n, 0);
  for (std::size_t e : seq) {
    if (e >= n) throw std::out_of_range("sequence item " + std::to_string(e) + " out of range");
    if (seen[e]) throw ConfigError("sequence repeats item " + std::to_string(e));
    seen[e] = 1;
  }
}

inline double log_factorial(std::size_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// log P(next = chosen | X) under the engine's current X. Candidates are the
// unselected items.
template <class Engine, class T>
T step_log_prob(const Engine& engine, std::size_t n, std::size_t chosen, double t) {
  std::vector<T> logits;
  T chosen_logit{};
  const Subset& x = engine.selected();
  for (std::size_t e = 0; e < n; ++e) {
    if (x.contains(e)) continue;
    T l = scale(engine.gain(e), 1.0 / t);
    if (e == chosen) chosen_logit = l;
    logits.push_back(l);
  }
  return chosen_logit - logsumexp(std::span<const T>(logits));
}

}  // namespace detail

// Draws a length-k sequence without replacement. Softmax uses max
// subtraction; draws are resolved toward the lowest index.
template <SetFunction F, class Urbg>
Sequence sample_sequence(const F& f, std::size_t k, double t, Urbg& rng) {
  const std::size_t n = f.size();
  detail::check_cardinality(k, n);
  detail::require_temperature(t);
  GreedyEngine<F> engine(f);
  Sequence seq;
  std::vector<std::size_t> cand;
  std::vector<double> logits;
  for (std::size_t i = 0; i < k; ++i) {
    cand.clear();
    logits.clear();
    for (std::size_t e = 0; e < n; ++e) {
      if (engine.selected().contains(e)) continue;
      cand.push_back(e);
      logits.push_back(value_of(engine.gain(e)) / t);
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double& l : logits) {
      l = std::exp(l - m);
      total += l;
    }
    const double u = uniform01(rng) * total;
    std::size_t pick = cand.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < cand.size(); ++j) {
      acc += logits[j];
      if (u < acc) {
        pick = j;
        break;
      }
    }
    seq.push_back(cand[pick]);
    engine.add(cand[pick]);
  }
  return seq;
}

inline Subset to_subset(std::size_t n, std::span<const std::size_t> seq) {
  return Subset::from_items(n, seq);
}

// log P(sigma) = sum_i [Delta+(sigma_i | X_{i-1}) / t
//                       - log sum_{e not in X_{i-1}} exp(Delta+(e | X_{i-1}) / t)].
template <SetFunction F>
typename F::scalar_type log_prob_sequence(const F& f, std::span<const std::size_t> seq,
                                          double t) {
  using T = typename F::scalar_type;
  const std::size_t n = f.size();
  detail::check_sequence(seq, n);
  detail::require_temperature(t);
  GreedyEngine<F> engine(f);
  std::vector<T> terms;
  for (std::size_t e : seq) {
    terms.push_back(detail::step_log_prob<GreedyEngine<F>, T>(engine, n, e, t));
    engine.add(e);
  }
  return sum(std::span<const T>(terms));
}

// Greedy order of the items of S: repeatedly the item of S with the largest
// gain, ties to the lowest index.
template <SetFunction F>
Sequence greedy_order(const F& f, const Subset& s) {
  detail::check_ground(f.size(), s);
  GreedyEngine<F> engine(f);
  std::vector<std::size_t> remaining = s.items();
  Sequence seq;
  while (!remaining.empty()) {
    std::size_t best = 0;
    double best_gain = value_of(engine.gain(remaining[0]));
    for (std::size_t j = 1; j < remaining.size(); ++j) {
      const double g = value_of(engine.gain(remaining[j]));
      if (g > best_gain) {
        best = j;
        best_gain = g;
      }
    }
    seq.push_back(remaining[best]);
    engine.add(remaining[best]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return seq;
}

namespace detail {

// Depth-first enumeration of all orderings of `remaining`, sharing the
// softmax normalizer of every prefix.
template <SetFunction F, class T = typename F::scalar_type>
void enumerate_orderings(const GreedyEngine<F>& engine, std::size_t n, double t,
                         std::vector<std::size_t>& remaining, const T& acc,
                         std::vector<T>& leaves) {
  if (remaining.empty()) {
    leaves.push_back(acc);
    return;
  }
  std::vector<T> logits;
  std::vector<T> cand_logit(n);
  for (std::size_t e = 0; e < n; ++e) {
    if (engine.selected().contains(e)) continue;
    cand_logit[e] = scale(engine.gain(e), 1.0 / t);
    logits.push_back(cand_logit[e]);
  }
  const T norm = logsumexp(std::span<const T>(logits));
  for (std::size_t j = 0; j < remaining.size(); ++j) {
    const std::size_t r = remaining[j];
    GreedyEngine<F> next = engine;
    next.add(r);
    std::vector<std::size_t> rest = remaining;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
    enumerate_orderings<F, T>(next, n, t, rest, acc + (cand_logit[r] - norm), leaves);
  }
}

}  // namespace detail

// log P(S) under the chosen likelihood mode. `rng` is required for
// RandomPerm.
template <SetFunction F>
typename F::scalar_type log_prob_set(const F& f, const Subset& s, double t,
                                     const SetLikelihoodMode& mode, Rng* rng = nullptr) {
  using T = typename F::scalar_type;
  const std::size_t n = f.size();
  detail::check_ground(n, s);
  detail::require_temperature(t);
  const std::size_t k = s.count();
  if (k == 0) return T(0.0);
  switch (mode.kind) {
    case SetLikelihoodMode::Kind::kExact: {
      if (k > mode.exact_threshold) {
        throw PreconditionError("exact set likelihood needs |S| <= " +
                                std::to_string(mode.exact_threshold) + ", got " +
                                std::to_string(k) +
                                "; use the greedy-perm or random-perm approximation");
      }
      GreedyEngine<F> engine(f);
      std::vector<std::size_t> remaining = s.items();
      std::vector<T> leaves;
      detail::enumerate_orderings<F, T>(engine, n, t, remaining, T(0.0), leaves);
      return logsumexp(std::span<const T>(leaves));
    }
    case SetLikelihoodMode::Kind::kGreedyPerm: {
      const Sequence seq = greedy_order(f, s);
      return log_prob_sequence(f, seq, t);
    }
    case SetLikelihoodMode::Kind::kRandomPerm: {
      if (rng == nullptr) throw ConfigError("random-perm likelihood needs an RNG");
      if (mode.num_samples == 0) throw ConfigError("random-perm needs num_samples >= 1");
      std::vector<std::size_t> perm = s.items();
      std::vector<T> logps;
      logps.reserve(mode.num_samples);
      for (std::size_t r = 0; r < mode.num_samples; ++r) {
        shuffle(perm, *rng);
        logps.push_back(log_prob_sequence(f, perm, t));
      }
      const double m = static_cast<double>(mode.num_samples);
      if (mode.log_space) {
        return scale(sum(std::span<const T>(logps)), 1.0 / m) + T(detail::log_factorial(k));
      }
      return logsumexp(std::span<const T>(logps)) + T(detail::log_factorial(k) - std::log(m));
    }
  }
  return T(0.0);
}

// Standard greedy: k argmax-gain picks, ties to the lowest index.
template <SetFunction F>
Sequence greedy_sequence(const F& f, std::size_t k) {
  const std::size_t n = f.size();
  detail::check_cardinality(k, n);
  GreedyEngine<F> engine(f);
  Sequence seq;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t best = n;
    double best_gain = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      if (engine.selected().contains(e)) continue;
      const double g = value_of(engine.gain(e));
      if (best == n || g > best_gain) {
        best = e;
        best_gain = g;
      }
    }
    seq.push_back(best);
    engine.add(best);
  }
  return seq;
}

template <SetFunction F>
Subset greedy_map(const F& f, std::size_t k) {
  return to_subset(f.size(), greedy_sequence(f, k));
}

}  // namespace subgrad
