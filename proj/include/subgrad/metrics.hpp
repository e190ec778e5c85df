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

// Evaluation metrics for learned set functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "subgrad/autodiff.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/set_functions.hpp"
#include "subgrad/subset.hpp"

namespace subgrad {

// f(S) / opt_value.
template <SetFunction F>
double cut_ratio(const F& f, const Subset& s, double opt_value) {
  if (!(opt_value > 0.0)) throw ConfigError("cut_ratio: opt_value must be positive");
  return value_of(f.evaluate(s)) / opt_value;
}

struct RelativeLikelihood {
  double magnitude = 0.0;  // |model - modular| / |modular|
  double signed_value = 0.0;  // positive iff model beats the modular baseline
};

inline RelativeLikelihood rll(double model_ll, double modular_ll) {
  if (!(modular_ll < 0.0)) throw ConfigError("rll: modular log-likelihood must be negative");
  const double rel = (model_ll - modular_ll) / -modular_ll;
  return {std::fabs(rel), rel};
}

// log P(S) of a set under some model.
using SetLogProb = std::function<double(const Subset&)>;

// Items outside `s` ordered by descending log P(s + e), ties by ascending id.
inline std::vector<std::size_t> rank_items(const SetLogProb& log_prob, const Subset& s) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t e = 0; e < s.ground_size(); ++e) {
    if (!s.contains(e)) scored.emplace_back(log_prob(s.with(e)), e);
  }
  if (scored.empty()) throw PreconditionError("rank_items: set is the whole ground set");
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<std::size_t> out;
  out.reserve(scored.size());
  for (const auto& p : scored) out.push_back(p.second);
  return out;
}

// argmax_{e not in s} P(s + e), ties to the lowest id.
inline std::size_t next_item(const SetLogProb& log_prob, const Subset& s) {
  std::size_t best = s.ground_size();
  double best_lp = 0.0;
  for (std::size_t e = 0; e < s.ground_size(); ++e) {
    if (s.contains(e)) continue;
    const double lp = log_prob(s.with(e));
    if (best == s.ground_size() || lp > best_lp) {
      best = e;
      best_lp = lp;
    }
  }
  if (best == s.ground_size()) throw PreconditionError("next_item: set is the whole ground set");
  return best;
}

using ItemPredictor = std::function<std::size_t(const Subset&)>;
using ItemRanker = std::function<std::vector<std::size_t>(const Subset&)>;

namespace detail {

inline std::size_t count_multi_item(std::span<const Subset> registries) {
  std::size_t m = 0;
  for (const auto& r : registries) m += r.count() > 1 ? 1 : 0;
  if (m == 0) throw PreconditionError("no registry has two or more items");
  return m;
}

}  // namespace detail

// Sum over registries with |R| > 1 and over held-out items r of
// 1{predict(R - r) = r}, divided by the number of such registries. With
// `normalized` each registry's sum is divided by |R| first.
inline double fill_in_accuracy(std::span<const Subset> registries, const ItemPredictor& predict,
                               bool normalized = false) {
  const std::size_t m = detail::count_multi_item(registries);
  double total = 0.0;
  for (const auto& r : registries) {
    if (r.count() < 2) continue;
    double hits = 0.0;
    for (std::size_t e : r.items()) hits += predict(r.without(e)) == e ? 1.0 : 0.0;
    total += normalized ? hits / static_cast<double>(r.count()) : hits;
  }
  return total / static_cast<double>(m);
}

// As fill_in_accuracy with 1 / rank(r) in place of the indicator.
inline double mrr(std::span<const Subset> registries, const ItemRanker& rank,
                  bool normalized = false) {
  const std::size_t m = detail::count_multi_item(registries);
  double total = 0.0;
  for (const auto& r : registries) {
    if (r.count() < 2) continue;
    double rr = 0.0;
    for (std::size_t e : r.items()) {
      const auto ranking = rank(r.without(e));
      const auto it = std::find(ranking.begin(), ranking.end(), e);
      if (it == ranking.end()) throw PreconditionError("ranker omitted a held-out item");
      rr += 1.0 / static_cast<double>(it - ranking.begin() + 1);
    }
    total += normalized ? rr / static_cast<double>(r.count()) : rr;
  }
  return total / static_cast<double>(m);
}

}  // namespace subgrad
