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

// Reverse-mode scalar automatic differentiation on an append-only tape.
//
// A Var is either a pure constant (no tape) or a handle to a node on a Tape.
// Mixing constants and tape nodes materializes the constants as kConst nodes,
// so generic code can be written once for `double` and `Var`. Nodes only refer
// to earlier nodes; forward values are computed by the same routine at record
// time and at replay time, which makes replay bit-exact.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "subgrad/errors.hpp"

namespace subgrad {

enum class Op : std::uint8_t {
  kConst,
  kParam,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kScale,        // a * aux
  kExp,
  kLog,
  kSum,          // n-ary
  kDot,          // 2m inputs: a_0..a_{m-1}, b_0..b_{m-1}
  kMax,          // n-ary, subgradient to the lowest-index argmax
  kSigmoid,      // 1 / (1 + exp(-(a - b) / aux))
  kLogSigmoid,   // log of the above
  kSoftplus,     // aux * log(1 + exp(a / aux))
  kLogSoftplus,  // log of the above
  kLogSumExp,    // n-ary
};

namespace detail {

// log(1 + exp(x)) without overflow.
inline double log1pexp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log(sigmoid(x)).
inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(log(1 + exp(x))). For x < -30, log1p(exp(x)) = y - y^2/2 + ... with
// y = exp(x) < 1e-13, so its log is x - y/2 to double precision even where
// exp(x) underflows.
inline double log_log1pexp(double x) {
  if (x < -30.0) return x - 0.5 * std::exp(x);
  return std::log(log1pexp(x));
}

inline std::size_t lowest_argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline double logsumexp(std::span<const double> v) {
  if (v.empty()) throw DomainError("logsumexp of an empty list");
  const double m = v[lowest_argmax(v)];
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline void require_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw ConfigError("temperature must be positive and finite, got " +
                      std::to_string(t));
  }
}

inline double forward_value(Op op, std::span<const double> in, double aux) {
  switch (op) {
    case Op::kConst:
    case Op::kParam:
      return aux;
    case Op::kAdd:
      return in[0] + in[1];
    case Op::kSub:
      return in[0] - in[1];
    case Op::kMul:
      return in[0] * in[1];
    case Op::kDiv:
      if (in[1] == 0.0) throw DomainError("division by zero");
      return in[0] / in[1];
    case Op::kNeg:
      return -in[0];
    case Op::kScale:
      return in[0] * aux;
    case Op::kExp:
      return std::exp(in[0]);
    case Op::kLog:
      if (!(in[0] > 0.0)) {
        throw DomainError("log of non-positive value " + std::to_string(in[0]));
      }
      return std::log(in[0]);
    case Op::kSum: {
      double s = 0.0;
      for (double x : in) s += x;
      return s;
    }
    case Op::kDot: {
      const std::size_t m = in.size() / 2;
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += in[i] * in[m + i];
      return s;
    }
    case Op::kMax:
      if (in.empty()) throw DomainError("max of an empty list");
      return in[lowest_argmax(in)];
    case Op::kSigmoid:
      return sigmoid((in[0] - in[1]) / aux);
    case Op::kLogSigmoid:
      return log_sigmoid((in[0] - in[1]) / aux);
    case Op::kSoftplus: {
      const double a = in[0];
      return a > 0.0 ? a + aux * std::log1p(std::exp(-a / aux))
                     : aux * std::log1p(std::exp(a / aux));
    }
    case Op::kLogSoftplus:
      return std::log(aux) + log_log1pexp(in[0] / aux);
    case Op::kLogSumExp:
      return logsumexp(in);
  }
  throw std::logic_error("unknown op");
}

// Writes d(out)/d(in[i]) into partial[i].
inline void local_partials(Op op, std::span<const double> in, double out,
                           double aux, std::span<double> partial) {
  switch (op) {
    case Op::kConst:
    case Op::kParam:
      return;
    case Op::kAdd:
      partial[0] = 1.0;
      partial[1] = 1.0;
      return;
    case Op::kSub:
      partial[0] = 1.0;
      partial[1] = -1.0;
      return;
    case Op::kMul:
      partial[0] = in[1];
      partial[1] = in[0];
      return;
    case Op::kDiv:
      partial[0] = 1.0 / in[1];
      partial[1] = -in[0] / (in[1] * in[1]);
      return;
    case Op::kNeg:
      partial[0] = -1.0;
      return;
    case Op::kScale:
      partial[0] = aux;
      return;
    case Op::kExp:
      partial[0] = out;
      return;
    case Op::kLog:
      partial[0] = 1.0 / in[0];
      return;
    case Op::kSum:
      std::fill(partial.begin(), partial.end(), 1.0);
      return;
    case Op::kDot: {
      const std::size_t m = in.size() / 2;
      for (std::size_t i = 0; i < m; ++i) {
        partial[i] = in[m + i];
        partial[m + i] = in[i];
      }
      return;
    }
    case Op::kMax:
      std::fill(partial.begin(), partial.end(), 0.0);
      partial[lowest_argmax(in)] = 1.0;
      return;
    case Op::kSigmoid: {
      const double d = out * (1.0 - out) / aux;
      partial[0] = d;
      partial[1] = -d;
      return;
    }
    case Op::kLogSigmoid: {
      // d/dx log sigmoid(x) = sigmoid(-x).
      const double d = sigmoid(-(in[0] - in[1]) / aux) / aux;
      partial[0] = d;
      partial[1] = -d;
      return;
    }
    case Op::kSoftplus:
      partial[0] = sigmoid(in[0] / aux);
      return;
    case Op::kLogSoftplus: {
      // sigmoid(x) / (aux * log1pexp(x)), formed in log space.
      const double x = in[0] / aux;
      partial[0] = std::exp(log_sigmoid(x) - log_log1pexp(x)) / aux;
      return;
    }
    case Op::kLogSumExp:
      for (std::size_t i = 0; i < in.size(); ++i) {
        partial[i] = std::exp(in[i] - out);
      }
      return;
  }
}

}  // namespace detail

class Tape;

// Scalar handle. Default-constructed and double-constructed Vars are pure
// constants that live on no tape.
class Var {
 public:
  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT: implicit by design of generic code

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id, double value)
      : tape_(tape), id_(id), value_(value) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
  double value_ = 0.0;
};

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Var>;

// Named dense real arrays laid out contiguously; the flat index of an entry
// is its parameter index on every tape the store is bound to.
struct ParamArray {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return rows * cols; }
  std::size_t index(std::size_t r, std::size_t c) const {
    return offset + r * cols + c;
  }
};

class ParamStore {
 public:
  const ParamArray& add(const std::string& name, std::size_t rows,
                        std::size_t cols, double init = 0.0) {
    for (const auto& a : arrays_) {
      if (a.name == name) throw ConfigError("duplicate parameter name " + name);
    }
    arrays_.push_back(ParamArray{name, rows, cols, values_.size()});
    values_.resize(values_.size() + rows * cols, init);
    return arrays_.back();
  }

  const ParamArray& find(const std::string& name) const {
    for (const auto& a : arrays_) {
      if (a.name == name) return a;
    }
    throw ConfigError("unknown parameter " + name);
  }

  bool contains(const std::string& name) const {
    return std::any_of(arrays_.begin(), arrays_.end(),
                       [&](const ParamArray& a) { return a.name == name; });
  }

  std::span<double> values(const std::string& name) {
    const auto& a = find(name);
    return std::span<double>(values_).subspan(a.offset, a.size());
  }
  std::span<const double> values(const std::string& name) const {
    const auto& a = find(name);
    return std::span<const double>(values_).subspan(a.offset, a.size());
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<ParamArray>& arrays() const { return arrays_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<ParamArray> arrays_;
  std::vector<double> values_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::size_t size() const { return nodes_.size(); }

  Var constant(double value) { return record(Op::kConst, {}, value); }

  Var parameter(double value) { return record(Op::kParam, {}, value); }

  // Registers every entry of `store` as a trainable parameter node. The
  // returned vector is indexed like ParamStore::values().
  std::vector<Var> bind(const ParamStore& store) {
    if (param_count_ != 0) throw ConfigError("tape already has bound parameters");
    param_begin_ = static_cast<std::uint32_t>(nodes_.size());
    std::vector<Var> out;
    out.reserve(store.size());
    for (double v : store.values()) out.push_back(parameter(v));
    param_count_ = store.size();
    return out;
  }

  // Records op over `args`. When every argument is a pure constant the result
  // is a pure constant as well and nothing is recorded.
  Var apply(Op op, std::span<const Var> args, double aux = 0.0) {
    return apply_on(this, op, args, aux);
  }

  static Var apply_any(Op op, std::span<const Var> args, double aux = 0.0) {
    Tape* tape = nullptr;
    for (const Var& v : args) {
      if (!v.is_constant()) {
        tape = v.tape();
        break;
      }
    }
    return apply_on(tape, op, args, aux);
  }

  double value(std::uint32_t id) const { return values_.at(id); }

  double adjoint(const Var& v) const {
    if (v.is_constant() || v.id() >= adjoints_.size()) return 0.0;
    return adjoints_[v.id()];
  }

  // Reverse sweep from `root`; returns d root / d parameter for every bound
  // parameter, in ParamStore order.
  std::vector<double> backward(const Var& root) {
    adjoints_.assign(nodes_.size(), 0.0);
    std::vector<double> grad(param_count_, 0.0);
    if (root.is_constant()) return grad;
    if (root.tape() != this) throw ConfigError("root lives on another tape");
    adjoints_[root.id()] = 1.0;
    std::vector<double> in;
    std::vector<double> partial;
    for (std::size_t i = root.id() + 1; i-- > 0;) {
      const double adj = adjoints_[i];
      if (adj == 0.0) continue;
      const Node& node = nodes_[i];
      if (node.num_args == 0) continue;
      gather(node, in);
      partial.assign(node.num_args, 0.0);
      detail::local_partials(node.op, in, values_[i], node.aux, partial);
      for (std::uint32_t k = 0; k < node.num_args; ++k) {
        adjoints_[args_[node.first_arg + k]] += adj * partial[k];
      }
    }
    for (std::size_t p = 0; p < param_count_; ++p) {
      grad[p] = adjoints_[param_begin_ + p];
    }
    return grad;
  }

  // Recomputes every node value from its inputs.
  std::vector<double> replay() const {
    std::vector<double> out(nodes_.size());
    std::vector<double> in;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& node = nodes_[i];
      in.clear();
      for (std::uint32_t k = 0; k < node.num_args; ++k) {
        in.push_back(out[args_[node.first_arg + k]]);
      }
      out[i] = detail::forward_value(node.op, in, node.aux);
    }
    return out;
  }

  const std::vector<double>& values() const { return values_; }

  // Input ids of node `id`; all are smaller than `id`.
  std::span<const std::uint32_t> inputs(std::uint32_t id) const {
    const Node& n = nodes_.at(id);
    return std::span<const std::uint32_t>(args_).subspan(n.first_arg, n.num_args);
  }

  Op op(std::uint32_t id) const { return nodes_.at(id).op; }

 private:
  struct Node {
    Op op;
    std::uint32_t first_arg;
    std::uint32_t num_args;
    double aux;
  };

  static Var apply_on(Tape* tape, Op op, std::span<const Var> args, double aux) {
    if (tape == nullptr) {
      std::vector<double> in;
      in.reserve(args.size());
      for (const Var& v : args) in.push_back(v.value());
      return Var(detail::forward_value(op, in, aux));
    }
    std::vector<std::uint32_t> ids;
    ids.reserve(args.size());
    for (const Var& v : args) {
      if (v.is_constant()) {
        ids.push_back(tape->constant(v.value()).id());
      } else {
        if (v.tape() != tape) throw ConfigError("operands live on different tapes");
        ids.push_back(v.id());
      }
    }
    return tape->record(op, ids, aux);
  }

  void gather(const Node& node, std::vector<double>& in) const {
    in.clear();
    for (std::uint32_t k = 0; k < node.num_args; ++k) {
      in.push_back(values_[args_[node.first_arg + k]]);
    }
  }

  Var record(Op op, std::span<const std::uint32_t> ids, double aux) {
    std::vector<double> in;
    in.reserve(ids.size());
    for (std::uint32_t id : ids) in.push_back(values_[id]);
    const double v = detail::forward_value(op, in, aux);
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{op, static_cast<std::uint32_t>(args_.size()),
                          static_cast<std::uint32_t>(ids.size()), aux});
    args_.insert(args_.end(), ids.begin(), ids.end());
    values_.push_back(v);
    return Var(this, id, v);
  }

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> args_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::uint32_t param_begin_ = 0;
  std::size_t param_count_ = 0;
};

// ---------------------------------------------------------------------------
// Elementary operations. Every function has a double and a Var overload so
// that set functions and algorithms can be written once, generically.

inline Var operator+(const Var& a, const Var& b) {
  const Var args[] = {a, b};
  return Tape::apply_any(Op::kAdd, args);
}
inline Var operator-(const Var& a, const Var& b) {
  const Var args[] = {a, b};
  return Tape::apply_any(Op::kSub, args);
}
inline Var operator*(const Var& a, const Var& b) {
  const Var args[] = {a, b};
  return Tape::apply_any(Op::kMul, args);
}
inline Var operator/(const Var& a, const Var& b) {
  const Var args[] = {a, b};
  return Tape::apply_any(Op::kDiv, args);
}
inline Var operator-(const Var& a) {
  const Var args[] = {a};
  return Tape::apply_any(Op::kNeg, args);
}
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

inline Var scale(const Var& a, double c) {
  const Var args[] = {a};
  return Tape::apply_any(Op::kScale, args, c);
}
inline double scale(double a, double c) { return a * c; }

inline Var exp(const Var& a) {
  const Var args[] = {a};
  return Tape::apply_any(Op::kExp, args);
}
inline double exp(double a) { return std::exp(a); }

inline Var log(const Var& a) {
  const Var args[] = {a};
  return Tape::apply_any(Op::kLog, args);
}
inline double log(double a) {
  if (!(a > 0.0)) throw DomainError("log of non-positive value " + std::to_string(a));
  return std::log(a);
}

inline Var sum(std::span<const Var> xs) {
  if (xs.empty()) return Var(0.0);
  return Tape::apply_any(Op::kSum, xs);
}
inline double sum(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

inline Var dot(std::span<const Var> a, std::span<const Var> b) {
  if (a.size() != b.size()) throw ConfigError("dot: length mismatch");
  if (a.empty()) return Var(0.0);
  std::vector<Var> args(a.begin(), a.end());
  args.insert(args.end(), b.begin(), b.end());
  return Tape::apply_any(Op::kDot, args);
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y = M x with M row-major (rows x cols); one fused dot node per output.
template <Scalar T>
std::vector<T> matvec(std::span<const T> m, std::size_t rows, std::size_t cols,
                      std::span<const T> x) {
  if (m.size() != rows * cols || x.size() != cols) {
    throw ConfigError("matvec: shape mismatch");
  }
  std::vector<T> y;
  y.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) y.push_back(dot(m.subspan(r * cols, cols), x));
  return y;
}

// Maximum with the full adjoint routed to the lowest-index argmax.
inline Var max_of(std::span<const Var> xs) {
  if (xs.empty()) throw DomainError("max of an empty list");
  if (xs.size() == 1) return xs[0];
  return Tape::apply_any(Op::kMax, xs);
}
inline double max_of(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("max of an empty list");
  return xs[detail::lowest_argmax(xs)];
}
template <Scalar T>
T max2(const T& a, const T& b) {
  const T args[] = {a, b};
  return max_of(std::span<const T>(args));
}

inline Var logsumexp(std::span<const Var> xs) {
  if (xs.empty()) throw DomainError("logsumexp of an empty list");
  return Tape::apply_any(Op::kLogSumExp, xs);
}
inline double logsumexp(std::span<const double> xs) { return detail::logsumexp(xs); }

// 1 / (1 + exp(-(a - b) / t)).
inline Var sigmoid_t(const Var& a, const Var& b, double t) {
  detail::require_temperature(t);
  const Var args[] = {a, b};
  return Tape::apply_any(Op::kSigmoid, args, t);
}
inline double sigmoid_t(double a, double b, double t) {
  detail::require_temperature(t);
  return detail::sigmoid((a - b) / t);
}

// log sigmoid_t(a, b, t), finite wherever the arguments are.
inline Var log_sigmoid_t(const Var& a, const Var& b, double t) {
  detail::require_temperature(t);
  const Var args[] = {a, b};
  return Tape::apply_any(Op::kLogSigmoid, args, t);
}
inline double log_sigmoid_t(double a, double b, double t) {
  detail::require_temperature(t);
  return detail::log_sigmoid((a - b) / t);
}

// t * log(1 + exp(a / t)); strictly positive and within t*ln2 of max(0, a).
inline Var softplus_t(const Var& a, double t) {
  detail::require_temperature(t);
  const Var args[] = {a};
  return Tape::apply_any(Op::kSoftplus, args, t);
}
inline double softplus_t(double a, double t) {
  detail::require_temperature(t);
  return detail::forward_value(Op::kSoftplus, std::span<const double>(&a, 1), t);
}

// log softplus_t(a, t), finite even where softplus_t underflows.
inline Var log_softplus_t(const Var& a, double t) {
  detail::require_temperature(t);
  const Var args[] = {a};
  return Tape::apply_any(Op::kLogSoftplus, args, t);
}
inline double log_softplus_t(double a, double t) {
  detail::require_temperature(t);
  return std::log(t) + detail::log_log1pexp(a / t);
}

}  // namespace subgrad
