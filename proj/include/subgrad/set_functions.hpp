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

// Submodular set functions, templated on the scalar type so the same object
// can be evaluated in plain doubles or recorded on an autodiff tape.
//
// Every function exposes `scalar_type`, `size()` and `evaluate(S)`. Gain
// engines (DoubleGreedyEngine, GreedyEngine) provide the incremental a_i / b_i
// bookkeeping used by the algorithms; the primary templates fall back to
// cached naive evaluation.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subgrad/autodiff.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/subset.hpp"

namespace subgrad {

template <class F>
concept SetFunction = requires(const F& f, const Subset& s) {
  typename F::scalar_type;
  { f.size() } -> std::convertible_to<std::size_t>;
  { f.evaluate(s) } -> std::convertible_to<typename F::scalar_type>;
};

namespace detail {

inline void check_ground(std::size_t n, const Subset& s) {
  if (s.ground_size() != n) {
    throw ConfigError("subset over ground set of size " +
                      std::to_string(s.ground_size()) + ", function has " +
                      std::to_string(n) + " items");
  }
}

inline void check_item(std::size_t n, std::size_t e) {
  if (e >= n) {
    throw std::out_of_range("item " + std::to_string(e) +
                            " outside ground set of size " + std::to_string(n));
  }
}

}  // namespace detail

// f(S) = sum_{e in S} s_e.
template <Scalar T>
class ModularFn {
 public:
  using scalar_type = T;

  explicit ModularFn(std::vector<T> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw ConfigError("ModularFn: empty ground set");
  }

  std::size_t size() const { return weights_.size(); }
  const T& weight(std::size_t e) const { return weights_.at(e); }
  const std::vector<T>& weights() const { return weights_; }

  T evaluate(const Subset& s) const {
    detail::check_ground(size(), s);
    std::vector<T> terms;
    terms.reserve(s.count());
    for (std::size_t e : s.items()) terms.push_back(weights_[e]);
    return sum(std::span<const T>(terms));
  }

 private:
  std::vector<T> weights_;
};

// f(S) = sum_{i in S} sum_{j not in S} w_ij with W symmetric, non-negative and
// zero on the diagonal.
template <Scalar T>
class CutFn {
 public:
  using scalar_type = T;

  CutFn(std::size_t n, std::vector<T> weights) : n_(n), w_(std::move(weights)) {
    if (n_ == 0) throw ConfigError("CutFn: empty ground set");
    if (w_.size() != n_ * n_) throw ConfigError("CutFn: weight matrix must be n x n");
    for (std::size_t i = 0; i < n_; ++i) {
      if (value_of(w_[i * n_ + i]) != 0.0) {
        throw ConfigError("CutFn: diagonal must be zero");
      }
      for (std::size_t j = 0; j < n_; ++j) {
        const double wij = value_of(w_[i * n_ + j]);
        if (!(wij >= 0.0)) throw ConfigError("CutFn: weights must be non-negative");
        if (wij != value_of(w_[j * n_ + i])) {
          throw ConfigError("CutFn: weight matrix must be symmetric");
        }
      }
    }
    degree_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::vector<T> row;
      row.reserve(n_ - 1);
      for (std::size_t j = 0; j < n_; ++j) {
        if (j != i) row.push_back(w_[i * n_ + j]);
      }
      degree_.push_back(sum(std::span<const T>(row)));
    }
  }

  std::size_t size() const { return n_; }
  const T& weight(std::size_t i, std::size_t j) const { return w_.at(i * n_ + j); }
  const T& degree(std::size_t i) const { return degree_.at(i); }
  const std::vector<T>& weights() const { return w_; }

  T evaluate(const Subset& s) const {
    detail::check_ground(n_, s);
    std::vector<T> terms;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!s.contains(i)) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!s.contains(j)) terms.push_back(w_[i * n_ + j]);
      }
    }
    return sum(std::span<const T>(terms));
  }

  // Sum of weights between `e` and the items of `s` (e itself excluded).
  T weight_into(std::size_t e, const Subset& s) const {
    std::vector<T> terms;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j != e && s.contains(j)) terms.push_back(w_[e * n_ + j]);
    }
    return sum(std::span<const T>(terms));
  }

 private:
  std::size_t n_;
  std::vector<T> w_;
  std::vector<T> degree_;
};

// f(S) = max_{e in S} w_e, with f({}) = 0.
template <Scalar T>
class FacilityLocationFn {
 public:
  using scalar_type = T;

  explicit FacilityLocationFn(std::vector<T> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw ConfigError("FacilityLocationFn: empty ground set");
    for (const T& w : w_) {
      if (!(value_of(w) >= 0.0)) {
        throw ConfigError("FacilityLocationFn: weights must be non-negative");
      }
    }
  }

  std::size_t size() const { return w_.size(); }
  const T& weight(std::size_t e) const { return w_.at(e); }

  T evaluate(const Subset& s) const {
    detail::check_ground(size(), s);
    if (s.empty()) return T(0.0);
    std::vector<T> vals;
    for (std::size_t e : s.items()) vals.push_back(w_[e]);
    return max_of(std::span<const T>(vals));
  }

 private:
  std::vector<T> w_;
};

// Facility location diversity model:
//   f(S) = sum_{i in S} u_i + sum_d (max_{i in S} w_id - sum_{i in S} w_id),
// with max over the empty set taken as 0, so f({}) = 0 and div(S) <= 0.
template <Scalar T>
class FlidFn {
 public:
  using scalar_type = T;

  // `latent` is row-major n x dims.
  FlidFn(std::vector<T> utilities, std::vector<T> latent, std::size_t dims)
      : u_(std::move(utilities)), w_(std::move(latent)), dims_(dims) {
    if (u_.empty()) throw ConfigError("FlidFn: empty ground set");
    if (w_.size() != u_.size() * dims_) {
      throw ConfigError("FlidFn: latent matrix must be n x D");
    }
    for (const T& w : w_) {
      if (!(value_of(w) >= 0.0)) {
        throw ConfigError("FlidFn: latent weights must be non-negative");
      }
    }
  }

  std::size_t size() const { return u_.size(); }
  std::size_t dims() const { return dims_; }
  const T& utility(std::size_t i) const { return u_.at(i); }
  const T& latent(std::size_t i, std::size_t d) const { return w_.at(i * dims_ + d); }

  T diversity(const Subset& s) const {
    detail::check_ground(size(), s);
    if (s.empty()) return T(0.0);
    const auto items = s.items();
    std::vector<T> terms;
    std::vector<T> column;
    for (std::size_t d = 0; d < dims_; ++d) {
      column.clear();
      for (std::size_t i : items) column.push_back(latent(i, d));
      terms.push_back(max_of(std::span<const T>(column)));
      for (std::size_t i : items) terms.push_back(-latent(i, d));
    }
    return sum(std::span<const T>(terms));
  }

  T evaluate(const Subset& s) const {
    detail::check_ground(size(), s);
    std::vector<T> terms;
    for (std::size_t i : s.items()) terms.push_back(u_[i]);
    terms.push_back(diversity(s));
    return sum(std::span<const T>(terms));
  }

 private:
  std::vector<T> u_;
  std::vector<T> w_;
  std::size_t dims_;
};

// f(S) = offset + max_{e in S} w_e - |S|^2 (max over {} is 0). With offset 2
// and w = (2, 1) this is the two-item fixture whose double-greedy output
// depends on the item order.
template <Scalar T>
class OrderingToyFn {
 public:
  using scalar_type = T;

  explicit OrderingToyFn(std::vector<T> weights = {T(2.0), T(1.0)}, double offset = 2.0)
      : fl_(std::move(weights)), offset_(offset) {}

  std::size_t size() const { return fl_.size(); }

  T evaluate(const Subset& s) const {
    const double k = static_cast<double>(s.count());
    return fl_.evaluate(s) + T(offset_ - k * k);
  }

 private:
  FacilityLocationFn<T> fl_;
  double offset_;
};

// Arbitrary set function given as a callable.
template <Scalar T>
class CallableFn {
 public:
  using scalar_type = T;

  CallableFn(std::size_t n, std::function<T(const Subset&)> fn)
      : n_(n), fn_(std::move(fn)) {
    if (n_ == 0) throw ConfigError("CallableFn: empty ground set");
  }

  std::size_t size() const { return n_; }

  T evaluate(const Subset& s) const {
    detail::check_ground(n_, s);
    return fn_(s);
  }

 private:
  std::size_t n_;
  std::function<T(const Subset&)> fn_;
};

// f(S) = inner(S) - shift. Gains are those of `inner`.
template <SetFunction F>
class ShiftedFn {
 public:
  using scalar_type = typename F::scalar_type;

  ShiftedFn(F inner, double shift) : inner_(std::move(inner)), shift_(shift) {}

  std::size_t size() const { return inner_.size(); }
  double shift() const { return shift_; }
  const F& inner() const { return inner_; }

  scalar_type evaluate(const Subset& s) const {
    return inner_.evaluate(s) - scalar_type(shift_);
  }

 private:
  F inner_;
  double shift_;
};

inline constexpr std::size_t kMaxShiftEnumeration = 20;

// Shifts f by its minimum over all 2^n subsets.
template <SetFunction F>
ShiftedFn<F> shift_to_nonnegative(const F& f) {
  const std::size_t n = f.size();
  if (n > kMaxShiftEnumeration) {
    throw PreconditionError("shift_to_nonnegative: n = " + std::to_string(n) +
                            " too large to enumerate; supply the shift");
  }
  double lo = std::numeric_limits<double>::infinity();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    lo = std::min(lo, value_of(f.evaluate(Subset::from_mask(n, m))));
  }
  return ShiftedFn<F>(f, lo);
}

template <SetFunction F>
ShiftedFn<F> shift_to_nonnegative(const F& f, double shift) {
  return ShiftedFn<F>(f, shift);
}

// Delta+(e | S) = f(S + e) - f(S).
template <SetFunction F>
typename F::scalar_type gain_add(const F& f, std::size_t e, const Subset& s) {
  detail::check_item(f.size(), e);
  if (s.contains(e)) {
    throw ConfigError("gain_add: item " + std::to_string(e) + " already in S");
  }
  return f.evaluate(s.with(e)) - f.evaluate(s);
}

// Delta-(e | S) = f(S - e) - f(S).
template <SetFunction F>
typename F::scalar_type gain_remove(const F& f, std::size_t e, const Subset& s) {
  detail::check_item(f.size(), e);
  if (!s.contains(e)) {
    throw ConfigError("gain_remove: item " + std::to_string(e) + " not in S");
  }
  return f.evaluate(s.without(e)) - f.evaluate(s);
}

// ---------------------------------------------------------------------------
// Double-greedy gain engines. An engine is driven in order: gains(pos, X, Y)
// for the item at position `pos` of the order, then decide(pos, include, X, Y)
// with the sets as they were before the decision.

template <SetFunction F>
class DoubleGreedyEngine {
 public:
  using T = typename F::scalar_type;

  DoubleGreedyEngine(const F& f, std::span<const std::size_t> order)
      : f_(&f), order_(order.begin(), order.end()) {
    const std::size_t n = f.size();
    fx_ = f.evaluate(Subset(n));
    fy_ = f.evaluate(Subset::full(n));
  }

  std::pair<T, T> gains(std::size_t pos, const Subset& x, const Subset& y) {
    const std::size_t e = order_[pos];
    fx_next_ = f_->evaluate(x.with(e));
    fy_next_ = f_->evaluate(y.without(e));
    return {fx_next_ - fx_, fy_next_ - fy_};
  }

  void decide(std::size_t /*pos*/, bool include, const Subset&, const Subset&) {
    if (include) {
      fx_ = fx_next_;
    } else {
      fy_ = fy_next_;
    }
  }

 private:
  const F* f_;
  std::vector<std::size_t> order_;
  T fx_{}, fy_{}, fx_next_{}, fy_next_{};
};

// a_i = s_e, b_i = -s_e.
template <Scalar T>
class DoubleGreedyEngine<ModularFn<T>> {
 public:
  DoubleGreedyEngine(const ModularFn<T>& f, std::span<const std::size_t> order)
      : f_(&f), order_(order.begin(), order.end()) {}

  std::pair<T, T> gains(std::size_t pos, const Subset&, const Subset&) {
    const T& s = f_->weight(order_[pos]);
    return {s, -s};
  }

  void decide(std::size_t, bool, const Subset&, const Subset&) {}

 private:
  const ModularFn<T>* f_;
  std::vector<std::size_t> order_;
};

// Running max c over X plus suffix maxima of the undecided items, so that
// max over Y and Y - e are both O(1) per step.
template <Scalar T>
class DoubleGreedyEngine<FacilityLocationFn<T>> {
 public:
  DoubleGreedyEngine(const FacilityLocationFn<T>& f, std::span<const std::size_t> order)
      : f_(&f), order_(order.begin(), order.end()), running_max_(0.0) {
    const std::size_t n = f.size();
    suffix_max_.assign(n + 1, T(0.0));
    for (std::size_t pos = n; pos-- > 0;) {
      suffix_max_[pos] = max2(f.weight(order_[pos]), suffix_max_[pos + 1]);
    }
  }

  std::pair<T, T> gains(std::size_t pos, const Subset&, const Subset&) {
    const T& w = f_->weight(order_[pos]);
    const T a = max2(running_max_, w) - running_max_;
    const T b = max2(running_max_, suffix_max_[pos + 1]) -
                max2(running_max_, suffix_max_[pos]);
    return {a, b};
  }

  void decide(std::size_t pos, bool include, const Subset&, const Subset&) {
    if (include) running_max_ = max2(running_max_, f_->weight(order_[pos]));
  }

  const T& running_max() const { return running_max_; }

 private:
  const FacilityLocationFn<T>* f_;
  std::vector<std::size_t> order_;
  T running_max_;
  std::vector<T> suffix_max_;
};

// a = deg(e) - 2 w(e, X), b = deg(e) - 2 w(e, V \ Y).
template <Scalar T>
class DoubleGreedyEngine<CutFn<T>> {
 public:
  DoubleGreedyEngine(const CutFn<T>& f, std::span<const std::size_t> order)
      : f_(&f), order_(order.begin(), order.end()) {}

  std::pair<T, T> gains(std::size_t pos, const Subset& x, const Subset& y) {
    const std::size_t e = order_[pos];
    const std::size_t n = f_->size();
    std::vector<T> into_x;
    std::vector<T> into_out;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == e) continue;
      if (x.contains(j)) into_x.push_back(f_->weight(e, j));
      if (!y.contains(j)) into_out.push_back(f_->weight(e, j));
    }
    const T& deg = f_->degree(e);
    const T a = deg - scale(sum(std::span<const T>(into_x)), 2.0);
    const T b = deg - scale(sum(std::span<const T>(into_out)), 2.0);
    return {a, b};
  }

  void decide(std::size_t, bool, const Subset&, const Subset&) {}

 private:
  const CutFn<T>* f_;
  std::vector<std::size_t> order_;
};

// Per-dimension running maxima over X and suffix maxima over undecided items.
template <Scalar T>
class DoubleGreedyEngine<FlidFn<T>> {
 public:
  DoubleGreedyEngine(const FlidFn<T>& f, std::span<const std::size_t> order)
      : f_(&f), order_(order.begin(), order.end()) {
    const std::size_t n = f.size();
    const std::size_t dims = f.dims();
    running_max_.assign(dims, T(0.0));
    suffix_max_.assign((n + 1) * dims, T(0.0));
    for (std::size_t pos = n; pos-- > 0;) {
      for (std::size_t d = 0; d < dims; ++d) {
        suffix_max_[pos * dims + d] =
            max2(f.latent(order_[pos], d), suffix_max_[(pos + 1) * dims + d]);
      }
    }
  }

  std::pair<T, T> gains(std::size_t pos, const Subset&, const Subset&) {
    const std::size_t e = order_[pos];
    const std::size_t dims = f_->dims();
    std::vector<T> a_terms{f_->utility(e)};
    std::vector<T> b_terms{-f_->utility(e)};
    for (std::size_t d = 0; d < dims; ++d) {
      const T& c = running_max_[d];
      const T& w = f_->latent(e, d);
      a_terms.push_back(max2(c, w));
      a_terms.push_back(-c);
      a_terms.push_back(-w);
      b_terms.push_back(max2(c, suffix_max_[(pos + 1) * dims + d]));
      b_terms.push_back(-max2(c, suffix_max_[pos * dims + d]));
      b_terms.push_back(w);
    }
    return {sum(std::span<const T>(a_terms)), sum(std::span<const T>(b_terms))};
  }

  void decide(std::size_t pos, bool include, const Subset&, const Subset&) {
    if (!include) return;
    const std::size_t e = order_[pos];
    for (std::size_t d = 0; d < f_->dims(); ++d) {
      running_max_[d] = max2(running_max_[d], f_->latent(e, d));
    }
  }

 private:
  const FlidFn<T>* f_;
  std::vector<std::size_t> order_;
  std::vector<T> running_max_;
  std::vector<T> suffix_max_;
};

template <SetFunction F>
class DoubleGreedyEngine<ShiftedFn<F>> {
 public:
  DoubleGreedyEngine(const ShiftedFn<F>& f, std::span<const std::size_t> order)
      : inner_(f.inner(), order) {}

  auto gains(std::size_t pos, const Subset& x, const Subset& y) {
    return inner_.gains(pos, x, y);
  }
  void decide(std::size_t pos, bool include, const Subset& x, const Subset& y) {
    inner_.decide(pos, include, x, y);
  }

 private:
  DoubleGreedyEngine<F> inner_;
};

namespace detail {

inline void check_permutation(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) {
    throw ConfigError("item order has " + std::to_string(order.size()) +
                      " entries, ground set has " + std::to_string(n));
  }
  std::vector<char> seen(n, 0);
  for (std::size_t e : order) {
    if (e >= n || seen[e]) throw ConfigError("item order is not a permutation");
    seen[e] = 1;
  }
}

}  // namespace detail

// Walks an item order making one include/exclude decision per item while
// maintaining X (grows from {}) and Y (shrinks from V). The function must
// outlive the walker.
template <SetFunction F>
class DoubleGreedyWalk {
 public:
  using T = typename F::scalar_type;

  DoubleGreedyWalk(const F& f, std::span<const std::size_t> order)
      : order_(validated(order, f.size())),
        engine_(f, order_),
        x_(f.size()),
        y_(Subset::full(f.size())) {}

  bool done() const { return pos_ == order_.size(); }
  std::size_t position() const { return pos_; }
  std::size_t next_item() const {
    if (done()) throw ConfigError("double greedy walk already finished");
    return order_[pos_];
  }
  const Subset& inner() const { return x_; }
  const Subset& outer() const { return y_; }

  // (a, b) = (Delta+(e | X), Delta-(e | Y)) for the next item.
  const std::pair<T, T>& gains() {
    if (done()) throw ConfigError("double greedy walk already finished");
    if (!have_gains_) {
      gains_ = engine_.gains(pos_, x_, y_);
      have_gains_ = true;
    }
    return gains_;
  }

  void decide(bool include) {
    if (done()) {
      throw ConfigError("decision sequence longer than the ground set");
    }
    gains();
    engine_.decide(pos_, include, x_, y_);
    const std::size_t e = order_[pos_];
    if (include) {
      x_.insert(e);
    } else {
      y_.erase(e);
    }
    ++pos_;
    have_gains_ = false;
  }

 private:
  static std::vector<std::size_t> validated(std::span<const std::size_t> order,
                                            std::size_t n) {
    detail::check_permutation(order, n);
    return {order.begin(), order.end()};
  }

  std::vector<std::size_t> order_;
  DoubleGreedyEngine<F> engine_;
  Subset x_;
  Subset y_;
  std::size_t pos_ = 0;
  bool have_gains_ = false;
  std::pair<T, T> gains_{};
};

// The (a_i, b_i) stream produced by the gain engine for a decision prefix.
template <SetFunction F>
std::vector<std::pair<typename F::scalar_type, typename F::scalar_type>>
incremental_gains(const F& f, std::span<const std::size_t> order,
                  const std::vector<bool>& decisions) {
  if (decisions.size() > f.size()) {
    throw ConfigError("decision prefix longer than the ground set");
  }
  DoubleGreedyWalk<F> walk(f, order);
  std::vector<std::pair<typename F::scalar_type, typename F::scalar_type>> out;
  for (bool include : decisions) {
    out.push_back(walk.gains());
    walk.decide(include);
  }
  if (!walk.done()) out.push_back(walk.gains());
  return out;
}

// Same stream computed from gain_add / gain_remove on explicit sets.
template <SetFunction F>
std::vector<std::pair<typename F::scalar_type, typename F::scalar_type>>
naive_gains(const F& f, std::span<const std::size_t> order,
            const std::vector<bool>& decisions) {
  if (decisions.size() > f.size()) {
    throw ConfigError("decision prefix longer than the ground set");
  }
  detail::check_permutation(order, f.size());
  Subset x(f.size());
  Subset y = Subset::full(f.size());
  std::vector<std::pair<typename F::scalar_type, typename F::scalar_type>> out;
  for (std::size_t pos = 0; pos <= decisions.size() && pos < order.size(); ++pos) {
    const std::size_t e = order[pos];
    out.emplace_back(gain_add(f, e, x), gain_remove(f, e, y));
    if (pos == decisions.size()) break;
    if (decisions[pos]) {
      x.insert(e);
    } else {
      y.erase(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Greedy gain engines: Delta+(e | X) for a growing X.

template <SetFunction F>
class GreedyEngine {
 public:
  using T = typename F::scalar_type;

  explicit GreedyEngine(const F& f) : f_(&f), x_(f.size()), fx_(f.evaluate(x_)) {}

  const Subset& selected() const { return x_; }

  T gain(std::size_t e) const {
    check(e);
    return f_->evaluate(x_.with(e)) - fx_;
  }

  void add(std::size_t e) {
    check(e);
    x_.insert(e);
    fx_ = f_->evaluate(x_);
  }

 private:
  void check(std::size_t e) const {
    if (x_.contains(e)) throw ConfigError("item already selected");
  }

  const F* f_;
  Subset x_;
  T fx_;
};

namespace detail {

class GreedyBase {
 public:
  explicit GreedyBase(std::size_t n) : x_(n) {}
  const Subset& selected() const { return x_; }

 protected:
  void check(std::size_t e) const {
    if (x_.contains(e)) throw ConfigError("item already selected");
  }
  Subset x_;
};

}  // namespace detail

template <Scalar T>
class GreedyEngine<ModularFn<T>> : public detail::GreedyBase {
 public:
  explicit GreedyEngine(const ModularFn<T>& f) : GreedyBase(f.size()), f_(&f) {}
  T gain(std::size_t e) const {
    check(e);
    return f_->weight(e);
  }
  void add(std::size_t e) {
    check(e);
    x_.insert(e);
  }

 private:
  const ModularFn<T>* f_;
};

template <Scalar T>
class GreedyEngine<FacilityLocationFn<T>> : public detail::GreedyBase {
 public:
  explicit GreedyEngine(const FacilityLocationFn<T>& f)
      : GreedyBase(f.size()), f_(&f), c_(0.0) {}
  T gain(std::size_t e) const {
    check(e);
    return max2(c_, f_->weight(e)) - c_;
  }
  void add(std::size_t e) {
    check(e);
    x_.insert(e);
    c_ = max2(c_, f_->weight(e));
  }

 private:
  const FacilityLocationFn<T>* f_;
  T c_;
};

// Maintains w(j, X) for every item j.
template <Scalar T>
class GreedyEngine<CutFn<T>> : public detail::GreedyBase {
 public:
  explicit GreedyEngine(const CutFn<T>& f)
      : GreedyBase(f.size()), f_(&f), into_x_(f.size(), T(0.0)) {}
  T gain(std::size_t e) const {
    check(e);
    return f_->degree(e) - scale(into_x_[e], 2.0);
  }
  void add(std::size_t e) {
    check(e);
    x_.insert(e);
    for (std::size_t j = 0; j < f_->size(); ++j) {
      if (!x_.contains(j)) into_x_[j] = into_x_[j] + f_->weight(j, e);
    }
  }

 private:
  const CutFn<T>* f_;
  std::vector<T> into_x_;
};

template <Scalar T>
class GreedyEngine<FlidFn<T>> : public detail::GreedyBase {
 public:
  explicit GreedyEngine(const FlidFn<T>& f)
      : GreedyBase(f.size()), f_(&f), c_(f.dims(), T(0.0)) {}
  T gain(std::size_t e) const {
    check(e);
    std::vector<T> terms{f_->utility(e)};
    for (std::size_t d = 0; d < f_->dims(); ++d) {
      const T& w = f_->latent(e, d);
      terms.push_back(max2(c_[d], w));
      terms.push_back(-c_[d]);
      terms.push_back(-w);
    }
    return sum(std::span<const T>(terms));
  }
  void add(std::size_t e) {
    check(e);
    x_.insert(e);
    for (std::size_t d = 0; d < f_->dims(); ++d) {
      c_[d] = max2(c_[d], f_->latent(e, d));
    }
  }

 private:
  const FlidFn<T>* f_;
  std::vector<T> c_;
};

template <SetFunction F>
class GreedyEngine<ShiftedFn<F>> {
 public:
  explicit GreedyEngine(const ShiftedFn<F>& f) : inner_(f.inner()) {}
  const Subset& selected() const { return inner_.selected(); }
  auto gain(std::size_t e) const { return inner_.gain(e); }
  void add(std::size_t e) { inner_.add(e); }

 private:
  GreedyEngine<F> inner_;
};

}  // namespace subgrad
