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

// Maximum-likelihood learning of set-function parameters through the
// probabilistic greedy algorithms: models, algorithm specs, Adam, and the
// epoch/batch loop.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "subgrad/autodiff.hpp"
#include "subgrad/double_greedy.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/greedy.hpp"
#include "subgrad/random.hpp"
#include "subgrad/set_functions.hpp"
#include "subgrad/subset.hpp"

namespace subgrad {

// A ground set (optionally with an n x d feature matrix, row-major) and the
// target set the learned function should be maximized to.
struct TrainingExample {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> features;
  Subset target;
};

// ---------------------------------------------------------------------------
// Graph points and RBF weights.

// Rows of `points` (n x dims) mapped to w_ij = exp(-|p_i - p_j|^2 / (2 gamma^2)),
// zero diagonal.
template <Scalar T>
CutFn<T> rbf_graph(std::span<const T> points, std::size_t n, std::size_t dims,
                   double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("rbf_graph: gamma must be positive");
  if (points.size() != n * dims) throw ConfigError("rbf_graph: points must be n x dims");
  std::vector<T> w(n * n, T(0.0));
  std::vector<T> diff(dims);
  const double c = -1.0 / (2.0 * gamma * gamma);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < dims; ++k) {
        diff[k] = points[i * dims + k] - points[j * dims + k];
      }
      const std::span<const T> dv(diff);
      const T wij = exp(scale(dot(dv, dv), c));
      w[i * n + j] = wij;
      w[j * n + i] = wij;
    }
  }
  return CutFn<T>(n, std::move(w));
}

// Projects each row of `features` (n x d) with `projection` (k x d).
template <Scalar T>
std::vector<T> project_points(std::span<const T> projection, std::size_t k, std::size_t d,
                              std::span<const double> features, std::size_t n) {
  if (features.size() != n * d) throw ConfigError("project_points: features must be n x d");
  Tape* tape = nullptr;
  if constexpr (std::is_same_v<T, Var>) {
    for (const Var& v : projection) {
      if (!v.is_constant()) {
        tape = v.tape();
        break;
      }
    }
  }
  std::vector<T> out;
  out.reserve(n * k);
  std::vector<T> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      if constexpr (std::is_same_v<T, Var>) {
        row[c] = tape ? tape->constant(features[i * d + c]) : Var(features[i * d + c]);
      } else {
        row[c] = features[i * d + c];
      }
    }
    auto y = matvec<T>(projection, k, d, std::span<const T>(row));
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models. Each owns a ParamStore and builds its set function from a flat
// parameter vector of doubles or tape variables.

// Learnable projection P (k x d); the graph is the RBF kernel on P x_i.
class MaxCutProjectionModel {
 public:
  static constexpr const char* kKind = "maxcut_projection";

  MaxCutProjectionModel(std::size_t k, std::size_t d, double gamma)
      : k_(k), d_(d), gamma_(gamma) {
    if (k == 0 || d == 0 || k > d) throw ConfigError("projection needs 1 <= k <= d");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    params_.add("projection", k, d, 0.0);
  }

  std::size_t k() const { return k_; }
  std::size_t d() const { return d_; }
  double gamma() const { return gamma_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  template <Scalar T>
  CutFn<T> function(std::span<const T> theta, const TrainingExample& ex) const {
    if (ex.d != d_) throw ConfigError("example feature dimension does not match model");
    const auto pts = project_points<T>(theta, k_, d_, ex.features, ex.n);
    return rbf_graph<T>(std::span<const T>(pts), ex.n, k_, gamma_);
  }

 private:
  std::size_t k_;
  std::size_t d_;
  double gamma_;
  ParamStore params_;
};

// FLID on a fixed ground set. Latent weights are softplus(raw) so they stay
// non-negative under unconstrained updates.
class FlidModel {
 public:
  static constexpr const char* kKind = "flid";

  FlidModel(std::size_t n, std::size_t dims) : n_(n), dims_(dims) {
    if (n == 0 || dims == 0) throw ConfigError("FLID needs n >= 1 and D >= 1");
    params_.add("utility", n, 1, 0.0);
    params_.add("latent_raw", n, dims, 0.0);
  }

  std::size_t n() const { return n_; }
  std::size_t dims() const { return dims_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  template <Scalar T>
  FlidFn<T> function(std::span<const T> theta, const TrainingExample& ex) const {
    if (ex.n != n_) throw ConfigError("example ground set does not match model");
    const auto& u = params_.find("utility");
    const auto& raw = params_.find("latent_raw");
    std::vector<T> util(theta.begin() + u.offset, theta.begin() + u.offset + u.size());
    std::vector<T> latent;
    latent.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      latent.push_back(softplus_t(theta[raw.offset + i], 1.0));
    }
    return FlidFn<T>(std::move(util), std::move(latent), dims_);
  }

 private:
  std::size_t n_;
  std::size_t dims_;
  ParamStore params_;
};

// Modular baseline f(S) = sum_{i in S} s_i on a fixed ground set.
class ModularModel {
 public:
  static constexpr const char* kKind = "modular";

  explicit ModularModel(std::size_t n) : n_(n) {
    if (n == 0) throw ConfigError("modular model needs n >= 1");
    params_.add("utility", n, 1, 0.0);
  }

  std::size_t n() const { return n_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  template <Scalar T>
  ModularFn<T> function(std::span<const T> theta, const TrainingExample& ex) const {
    if (ex.n != n_) throw ConfigError("example ground set does not match model");
    return ModularFn<T>(std::vector<T>(theta.begin(), theta.end()));
  }

 private:
  std::size_t n_;
  ParamStore params_;
};

template <class M>
concept Model = requires(const M& m, std::span<const double> pd, std::span<const Var> pv,
                         const TrainingExample& ex) {
  { m.params() } -> std::same_as<const ParamStore&>;
  m.template function<double>(pd, ex);
  m.template function<Var>(pv, ex);
};

// Fills every parameter with seeded uniform values in [lo, hi).
inline void init_uniform(ParamStore& params, std::uint64_t seed, double lo, double hi) {
  Rng rng = stream_rng(seed, 0x1417);
  for (double& v : params.values()) v = lo + (hi - lo) * uniform01(rng);
}

// ---------------------------------------------------------------------------
// Algorithm specs.

struct DoubleGreedySpec {
  LinkFunction link = LinkFunction::softplus_ratio(0.125);
  // Identity order per example when unset.
  std::optional<ItemOrder> order;
};

struct GreedySpec {
  double temperature = 1.0;
  // Used for targets larger than approximation.exact_threshold.
  SetLikelihoodMode approximation = SetLikelihoodMode::random_perm();
};

using AlgorithmSpec = std::variant<DoubleGreedySpec, GreedySpec>;

// log P(target) of `f` under `spec`. `rng` is needed by random-permutation
// approximations only.
template <SetFunction F>
typename F::scalar_type set_log_likelihood(const F& f, const AlgorithmSpec& spec,
                                           const Subset& target, Rng* rng) {
  if (const auto* dg = std::get_if<DoubleGreedySpec>(&spec)) {
    const ItemOrder order = dg->order ? *dg->order : ItemOrder::identity(f.size());
    return log_likelihood(f, dg->link, order, target);
  }
  const auto& gs = std::get<GreedySpec>(spec);
  if (target.count() <= gs.approximation.exact_threshold) {
    return log_prob_set(f, target, gs.temperature,
                        SetLikelihoodMode::exact(gs.approximation.exact_threshold), rng);
  }
  return log_prob_set(f, target, gs.temperature, gs.approximation, rng);
}

// Per-example RNG for stochastic likelihood approximations.
inline Rng likelihood_rng(std::uint64_t seed, std::uint64_t epoch, std::uint64_t example) {
  return stream_rng(seed ^ 0x9e3779b97f4a7c15ULL, epoch, example);
}

// Mean negative log-likelihood over `batch`, recorded on one tape through
// `theta` (bound parameters).
template <Model M>
Var nll(const M& model, std::span<const Var> theta,
        std::span<const TrainingExample> batch, const AlgorithmSpec& spec,
        std::uint64_t seed = 0, std::uint64_t epoch = 0) {
  if (batch.empty()) throw ConfigError("nll: empty batch");
  std::vector<Var> terms;
  terms.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Rng rng = likelihood_rng(seed, epoch, i);
    const auto f = model.template function<Var>(theta, batch[i]);
    const Var ll = set_log_likelihood(f, spec, batch[i].target, &rng);
    if (!std::isfinite(ll.value())) throw NonFiniteLikelihood(i, ll.value());
    terms.push_back(ll);
  }
  return scale(sum(std::span<const Var>(terms)), -1.0 / static_cast<double>(batch.size()));
}

// log-likelihood of one example and its gradient with respect to every
// model parameter.
template <Model M>
std::pair<double, std::vector<double>> example_gradient(const M& model,
                                                        const TrainingExample& ex,
                                                        const AlgorithmSpec& spec,
                                                        Rng* rng) {
  Tape tape;
  const auto theta = tape.bind(model.params());
  const auto f = model.template function<Var>(std::span<const Var>(theta), ex);
  const Var ll = set_log_likelihood(f, spec, ex.target, rng);
  return {ll.value(), tape.backward(ll)};
}

// Mean log-likelihood of `data` in plain doubles.
template <Model M>
double mean_log_likelihood(const M& model, std::span<const TrainingExample> data,
                           const AlgorithmSpec& spec, std::uint64_t seed = 0,
                           unsigned threads = 1) {
  if (data.empty()) throw ConfigError("mean_log_likelihood: empty data");
  std::vector<double> ll(data.size());
  const std::span<const double> theta(model.params().values());
  parallel_for(data.size(), threads, [&](std::size_t i) {
    Rng rng = likelihood_rng(seed, ~std::uint64_t{0}, i);
    const auto f = model.template function<double>(theta, data[i]);
    ll[i] = set_log_likelihood(f, spec, data[i].target, &rng);
  });
  double total = 0.0;
  for (double v : ll) total += v;
  return total / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------
// Optimizer and loop.

struct TrainConfig {
  double learning_rate = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch_size = 16;
  std::size_t epochs = 10;
  double lr_decay = 1.0;  // learning rate scaled by lr_decay^epoch
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const {
    if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in (0, 1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in (0, 1)");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    if (!(lr_decay > 0.0)) throw ConfigError("lr decay must be positive");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_log_likelihood = 0.0;
};

struct TrainState {
  std::size_t step = 0;
  std::size_t epoch = 0;  // 0-based epoch currently running
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::vector<EpochRecord> history;
};

// One bias-corrected Adam step on `params` for gradient `grad` of the loss.
// Weight decay is decoupled: params *= (1 - lr * weight_decay).
inline void adam_step(TrainState& state, std::span<const double> grad,
                      std::vector<double>& params, const TrainConfig& cfg) {
  if (grad.size() != params.size()) {
    throw ShapeError("adam_step: gradient has " + std::to_string(grad.size()) +
                     " entries, parameters " + std::to_string(params.size()));
  }
  if (state.first_moment.empty()) {
    state.first_moment.assign(params.size(), 0.0);
    state.second_moment.assign(params.size(), 0.0);
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state does not match parameters");
  }
  ++state.step;
  const double lr = cfg.learning_rate * std::pow(cfg.lr_decay, static_cast<double>(state.epoch));
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad[i];
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad[i] * grad[i];
    if (cfg.weight_decay != 0.0) params[i] *= 1.0 - lr * cfg.weight_decay;
    params[i] -= lr * (m / c1) / (std::sqrt(v / c2) + cfg.eps);
  }
}

using EpochCallback = std::function<void(const EpochRecord&)>;

// Epochs of seeded-shuffle minibatches. Per-example gradients are computed
// on separate tapes (in parallel when cfg.threads > 1) and reduced in
// example order, so results do not depend on the thread count. After every
// epoch the mean train log-likelihood is recorded.
template <Model M>
TrainState train(M& model, std::span<const TrainingExample> data, const AlgorithmSpec& spec,
                 const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (data.empty()) throw ConfigError("train: empty dataset");
  TrainState state;
  std::vector<std::size_t> perm(data.size());
  std::vector<double> grad(model.params().size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    state.epoch = epoch;
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng shuffle_rng = stream_rng(cfg.seed, epoch, 0x5eed);
    shuffle(perm, shuffle_rng);
    for (std::size_t begin = 0; begin < perm.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(perm.size(), begin + cfg.batch_size);
      const std::size_t b = end - begin;
      std::vector<std::vector<double>> grads(b);
      std::vector<double> lls(b);
      parallel_for(b, cfg.threads, [&](std::size_t j) {
        const std::size_t idx = perm[begin + j];
        Rng rng = likelihood_rng(cfg.seed, epoch, idx);
        auto [ll, g] = example_gradient(model, data[idx], spec, &rng);
        lls[j] = ll;
        grads[j] = std::move(g);
      });
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t j = 0; j < b; ++j) {
        if (!std::isfinite(lls[j])) throw NonFiniteLikelihood(perm[begin + j], lls[j]);
        for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += grads[j][p];
      }
      for (double& g : grad) g *= -1.0 / static_cast<double>(b);
      adam_step(state, grad, model.params().values(), cfg);
    }
    const EpochRecord rec{epoch + 1,
                          mean_log_likelihood(model, data, spec, cfg.seed, cfg.threads)};
    state.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return state;
}

}  // namespace subgrad
