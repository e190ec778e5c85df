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

// Synthetic max-cut corpora, registry files, random instances, and JSON
// checkpoints.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "subgrad/double_greedy.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/greedy.hpp"
#include "subgrad/metrics.hpp"
#include "subgrad/oracle.hpp"
#include "subgrad/random.hpp"
#include "subgrad/set_functions.hpp"
#include "subgrad/subset.hpp"
#include "subgrad/train.hpp"

namespace subgrad {

using json = nlohmann::json;

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;

// ---------------------------------------------------------------------------
// File helpers.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed for " + path);
}

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Max-cut corpus.

struct MaxCutConfig {
  std::size_t m = 0;
  std::size_t n = 15;
  std::size_t d = 10;
  std::size_t k = 5;
  double gamma = 0.3;
  std::uint64_t seed = 0;

  void validate() const {
    if (m == 0) throw ConfigError("need at least one example");
    if (n < 2) throw ConfigError("need n >= 2");
    if (n > kMaxBruteForceItems) {
      throw ConfigError("n = " + std::to_string(n) + " exceeds the brute-force limit of " +
                        std::to_string(kMaxBruteForceItems));
    }
    if (d == 0 || k == 0 || k > d) throw ConfigError("need 1 <= k <= d");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  }
};

struct MaxCutExample {
  std::vector<double> features;  // n x d, row-major
  Subset opt;
  double opt_value = 0.0;
};

struct MaxCutDataset {
  MaxCutConfig config;
  std::vector<MaxCutExample> examples;
  json generated_by = json::object();

  std::vector<TrainingExample> training_examples() const {
    std::vector<TrainingExample> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) {
      out.push_back(TrainingExample{config.n, config.d, ex.features, ex.opt});
    }
    return out;
  }
};

// The coordinate-selection matrix [I_k | 0], k x d.
inline std::vector<double> coordinate_projection(std::size_t k, std::size_t d) {
  if (k == 0 || k > d) throw ConfigError("need 1 <= k <= d");
  std::vector<double> p(k * d, 0.0);
  for (std::size_t i = 0; i < k; ++i) p[i * d + i] = 1.0;
  return p;
}

// Projection with independent N(0, 1/d) entries.
inline std::vector<double> random_projection(std::size_t k, std::size_t d, std::uint64_t seed) {
  Rng rng = stream_rng(seed, 0x7a11d0);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> p(k * d);
  for (double& v : p) v = normal(rng);
  return p;
}

inline CutFn<double> projected_graph(std::span<const double> projection, std::size_t k,
                                     std::size_t d, std::span<const double> features,
                                     std::size_t n, double gamma) {
  const auto pts = project_points<double>(projection, k, d, features, n);
  return rbf_graph<double>(std::span<const double>(pts), n, k, gamma);
}

inline MaxCutDataset gen_maxcut_dataset(const MaxCutConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  MaxCutDataset ds;
  ds.config = cfg;
  ds.examples.resize(cfg.m);
  const auto truth = coordinate_projection(cfg.k, cfg.d);
  parallel_for(cfg.m, threads, [&](std::size_t i) {
    Rng rng = stream_rng(cfg.seed, i);
    MaxCutExample ex;
    ex.features.resize(cfg.n * cfg.d);
    for (double& x : ex.features) x = uniform01(rng);
    const auto f = projected_graph(truth, cfg.k, cfg.d, ex.features, cfg.n, cfg.gamma);
    auto best = brute_force_max(f);
    ex.opt = std::move(best.set);
    ex.opt_value = best.value;
    ds.examples[i] = std::move(ex);
  });
  return ds;
}

// Per-graph cut ratio of double greedy run on the graph induced by
// `projection`, scored on the generator's own graph. samples == 0 uses the
// deterministic g >= 1/2 decision; otherwise the ratio is averaged over
// `samples` draws from stream_rng(seed, graph, stream).
inline std::vector<double> projected_cut_ratios(const MaxCutDataset& ds,
                                                std::span<const double> projection,
                                                const LinkFunction& link, const ItemOrder& order,
                                                std::size_t samples, std::uint64_t seed,
                                                std::uint64_t stream = 0, unsigned threads = 1) {
  const auto& c = ds.config;
  if (projection.size() != c.k * c.d) throw ShapeError("projection must be k x d");
  const auto truth = coordinate_projection(c.k, c.d);
  std::vector<double> out(ds.examples.size());
  parallel_for(ds.examples.size(), threads, [&](std::size_t i) {
    const auto& ex = ds.examples[i];
    const auto f = projected_graph(truth, c.k, c.d, ex.features, c.n, c.gamma);
    const auto g = projected_graph(projection, c.k, c.d, ex.features, c.n, c.gamma);
    if (samples == 0) {
      out[i] = cut_ratio(f, map_execute(g, link, order).set, ex.opt_value);
      return;
    }
    Rng rng = stream_rng(seed, i, stream);
    double total = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      total += cut_ratio(f, sample(g, link, order, rng, false).set, ex.opt_value);
    }
    out[i] = total / static_cast<double>(samples);
  });
  return out;
}

inline json subset_to_json(const Subset& s) { return json(s.items()); }

inline Subset subset_from_json(const json& j, std::size_t n) {
  std::vector<std::size_t> items = j.get<std::vector<std::size_t>>();
  for (std::size_t e : items) {
    if (e >= n) throw ShapeError("item id " + std::to_string(e) + " out of range");
  }
  return Subset::from_items(n, items);
}

inline json to_json(const MaxCutDataset& ds) {
  json j;
  j["format_version"] = kDatasetFormatVersion;
  j["n"] = ds.config.n;
  j["d"] = ds.config.d;
  j["k"] = ds.config.k;
  j["gamma"] = ds.config.gamma;
  j["kernel"] = "exp(-|p_i-p_j|^2/(2*gamma^2))";
  j["seed"] = ds.config.seed;
  j["generated_by"] = ds.generated_by;
  json arr = json::array();
  for (const auto& ex : ds.examples) {
    arr.push_back({{"X", ex.features}, {"opt", subset_to_json(ex.opt)},
                   {"opt_value", ex.opt_value}});
  }
  j["examples"] = std::move(arr);
  return j;
}

inline MaxCutDataset maxcut_dataset_from_json(const json& j) {
  MaxCutDataset ds;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kDatasetFormatVersion) {
      throw VersionError("dataset format version " + std::to_string(version) +
                         ", expected " + std::to_string(kDatasetFormatVersion));
    }
    ds.config.n = j.at("n").get<std::size_t>();
    ds.config.d = j.at("d").get<std::size_t>();
    ds.config.k = j.at("k").get<std::size_t>();
    ds.config.gamma = j.at("gamma").get<double>();
    ds.config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("generated_by")) ds.generated_by = j.at("generated_by");
    for (const auto& e : j.at("examples")) {
      MaxCutExample ex;
      ex.features = e.at("X").get<std::vector<double>>();
      if (ex.features.size() != ds.config.n * ds.config.d) {
        throw ShapeError("example " + std::to_string(ds.examples.size()) +
                         ": X must have n*d entries");
      }
      ex.opt = subset_from_json(e.at("opt"), ds.config.n);
      ex.opt_value = e.at("opt_value").get<double>();
      ds.examples.push_back(std::move(ex));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed dataset: ") + e.what());
  }
  ds.config.m = ds.examples.size();
  return ds;
}

inline void save_maxcut_dataset(const MaxCutDataset& ds, const std::string& path) {
  write_file(path, to_json(ds).dump() + "\n");
}

inline MaxCutDataset load_maxcut_dataset(const std::string& path) {
  return maxcut_dataset_from_json(parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Registries: one per line, space-separated zero-based ids, optional header
// line "n=<int>".

struct RegistryDataset {
  std::size_t n = 0;
  std::vector<Subset> registries;

  std::vector<std::size_t> frequencies() const {
    std::vector<std::size_t> counts(n, 0);
    for (const auto& r : registries) {
      for (std::size_t e : r.items()) ++counts[e];
    }
    return counts;
  }

  std::vector<TrainingExample> training_examples(std::span<const std::size_t> indices) const {
    std::vector<TrainingExample> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(TrainingExample{n, 0, {}, registries.at(i)});
    return out;
  }
};

inline RegistryDataset parse_registries(std::istream& in, const std::string& source) {
  RegistryDataset ds;
  std::vector<std::vector<std::size_t>> rows;
  std::vector<std::size_t> row_lines;
  bool have_n = false;
  std::size_t max_id = 0;
  bool any_item = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ParseError(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto first = line.find_first_not_of(" \t");
    if (line.compare(first, 2, "n=") == 0) {
      if (have_n || !rows.empty()) fail("header must be the first line");
      std::istringstream hs(line.substr(first + 2));
      long long v = -1;
      std::string rest;
      if (!(hs >> v) || (hs >> rest) || v <= 0) fail("bad header '" + line + "'");
      ds.n = static_cast<std::size_t>(v);
      have_n = true;
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::size_t> items;
    std::string tok;
    while (ls >> tok) {
      if (tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9) {
        fail("bad item id '" + tok + "'");
      }
      const std::size_t id = std::stoul(tok);
      if (have_n && id >= ds.n) {
        fail("item id " + tok + " out of range for n=" + std::to_string(ds.n));
      }
      if (std::find(items.begin(), items.end(), id) != items.end()) {
        fail("duplicate item id " + tok);
      }
      items.push_back(id);
      max_id = any_item ? std::max(max_id, id) : id;
      any_item = true;
    }
    rows.push_back(std::move(items));
    row_lines.push_back(lineno);
  }
  if (rows.empty()) throw ParseError(source + ": no registries");
  if (!have_n) ds.n = max_id + 1;
  for (auto& r : rows) ds.registries.push_back(Subset::from_items(ds.n, r));
  return ds;
}

inline RegistryDataset parse_registries(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse_registries(in, source);
}

inline RegistryDataset load_registries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_registries(in, path);
}

inline std::string format_registries(const RegistryDataset& ds) {
  std::string out = "n=" + std::to_string(ds.n) + "\n";
  for (const auto& r : ds.registries) {
    const auto items = r.items();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(items[i]);
    }
    out += '\n';
  }
  return out;
}

inline void save_registries(const RegistryDataset& ds, const std::string& path) {
  write_file(path, format_registries(ds));
}

// Descending empirical frequency, ties by ascending id.
inline ItemOrder order_by_frequency(const RegistryDataset& ds) {
  return ItemOrder::by_frequency(ds.frequencies());
}

// Seeded balanced fold labels in [0, folds).
inline std::vector<std::size_t> assign_folds(std::size_t count, std::size_t folds,
                                             std::uint64_t seed) {
  if (folds < 2) throw ConfigError("need at least 2 folds");
  if (count < folds) throw ConfigError("fewer registries than folds");
  std::vector<std::size_t> perm(count);
  for (std::size_t i = 0; i < count; ++i) perm[i] = i;
  Rng rng = stream_rng(seed, 0xf01d);
  shuffle(perm, rng);
  std::vector<std::size_t> fold(count);
  for (std::size_t i = 0; i < count; ++i) fold[perm[i]] = i % folds;
  return fold;
}

// Draws `count` registries from PD2Greedy on `f`. Empty draws are kept.
template <SetFunction F>
RegistryDataset sample_registries(const F& f, const LinkFunction& link, const ItemOrder& order,
                                  std::size_t count, std::uint64_t seed, unsigned threads = 1) {
  RegistryDataset ds;
  ds.n = f.size();
  ds.registries = sample_many(f, link, order, seed, count, threads);
  return ds;
}

// ---------------------------------------------------------------------------
// Random instances.

inline CutFn<double> random_cut(std::size_t n, Rng& rng, double density = 0.6) {
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform01(rng) < density) {
        const double v = uniform01(rng);
        w[i * n + j] = v;
        w[j * n + i] = v;
      }
    }
  }
  return CutFn<double>(n, std::move(w));
}

inline FlidFn<double> random_flid(std::size_t n, std::size_t dims, Rng& rng) {
  std::vector<double> u(n), w(n * dims);
  for (double& v : u) v = 2.0 * uniform01(rng) - 1.0;
  for (double& v : w) v = 2.0 * uniform01(rng);
  return FlidFn<double>(std::move(u), std::move(w), dims);
}

inline ModularFn<double> random_modular(std::size_t n, Rng& rng, double lo = -2.0,
                                        double hi = 2.0) {
  std::vector<double> s(n);
  for (double& v : s) v = lo + (hi - lo) * uniform01(rng);
  return ModularFn<double>(std::move(s));
}

// ---------------------------------------------------------------------------
// Checkpoints.

inline json to_json(const LinkFunction& link) {
  json j{{"kind", link.name()}};
  if (link.kind() == LinkKind::kSigmoid || link.kind() == LinkKind::kSoftplusRatio) {
    j["temperature"] = link.temperature();
  }
  return j;
}

inline LinkFunction link_from_json(const json& j) {
  const double t = j.contains("temperature") ? j.at("temperature").get<double>() : 1.0;
  return LinkFunction::parse(j.at("kind").get<std::string>(), t);
}

inline json to_json(const AlgorithmSpec& spec) {
  if (const auto* dg = std::get_if<DoubleGreedySpec>(&spec)) {
    json j{{"name", "pd2greedy"}, {"link", to_json(dg->link)}};
    j["order"] = dg->order ? json(dg->order->items()) : json(nullptr);
    return j;
  }
  const auto& gs = std::get<GreedySpec>(spec);
  return json{{"name", "pgreedy"},
              {"temperature", gs.temperature},
              {"approximation", to_string(gs.approximation.kind)},
              {"num_samples", gs.approximation.num_samples},
              {"log_space", gs.approximation.log_space},
              {"exact_threshold", gs.approximation.exact_threshold}};
}

inline AlgorithmSpec algorithm_from_json(const json& j) {
  const auto name = j.at("name").get<std::string>();
  if (name == "pd2greedy") {
    DoubleGreedySpec dg;
    dg.link = link_from_json(j.at("link"));
    if (!j.at("order").is_null()) {
      dg.order = ItemOrder::explicit_order(j.at("order").get<std::vector<std::size_t>>());
    }
    return dg;
  }
  if (name == "pgreedy") {
    GreedySpec gs;
    gs.temperature = j.at("temperature").get<double>();
    const auto kind = j.at("approximation").get<std::string>();
    const auto threshold = j.at("exact_threshold").get<std::size_t>();
    if (kind == to_string(SetLikelihoodMode::Kind::kExact)) {
      gs.approximation = SetLikelihoodMode::exact(threshold);
    } else if (kind == to_string(SetLikelihoodMode::Kind::kGreedyPerm)) {
      gs.approximation = SetLikelihoodMode::greedy_perm();
    } else if (kind == to_string(SetLikelihoodMode::Kind::kRandomPerm)) {
      gs.approximation = SetLikelihoodMode::random_perm(j.at("num_samples").get<std::size_t>(),
                                                        j.at("log_space").get<bool>());
    } else {
      throw ParseError("unknown set likelihood approximation " + kind);
    }
    gs.approximation.exact_threshold = threshold;
    return gs;
  }
  throw ParseError("unknown algorithm " + name);
}

struct Checkpoint {
  std::string model_kind;
  json model_config = json::object();
  ParamStore params;
  AlgorithmSpec algorithm;
  std::uint64_t seed = 0;
  json generated_by = json::object();
  std::vector<EpochRecord> history;
};

inline json to_json(const Checkpoint& c) {
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["model"] = {{"kind", c.model_kind}, {"config", c.model_config}};
  json arrays = json::array();
  for (const auto& a : c.params.arrays()) {
    const auto v = c.params.values(a.name);
    arrays.push_back({{"name", a.name},
                      {"rows", a.rows},
                      {"cols", a.cols},
                      {"values", std::vector<double>(v.begin(), v.end())}});
  }
  j["parameters"] = std::move(arrays);
  j["algorithm"] = to_json(c.algorithm);
  j["rng"] = {{"algorithm", kRngName}, {"seed", c.seed}};
  json hist = json::array();
  for (const auto& h : c.history) {
    hist.push_back({{"epoch", h.epoch}, {"mean_log_likelihood", h.mean_log_likelihood}});
  }
  j["history"] = std::move(hist);
  j["generated_by"] = c.generated_by;
  return j;
}

inline Checkpoint checkpoint_from_json(const json& j) {
  Checkpoint c;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw VersionError("checkpoint format version " + std::to_string(version) +
                         ", expected " + std::to_string(kCheckpointFormatVersion));
    }
    c.model_kind = j.at("model").at("kind").get<std::string>();
    c.model_config = j.at("model").at("config");
    for (const auto& a : j.at("parameters")) {
      const auto name = a.at("name").get<std::string>();
      const auto rows = a.at("rows").get<std::size_t>();
      const auto cols = a.at("cols").get<std::size_t>();
      const auto values = a.at("values").get<std::vector<double>>();
      if (values.size() != rows * cols) {
        throw ShapeError("parameter " + name + " has " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
      }
      c.params.add(name, rows, cols);
      std::copy(values.begin(), values.end(), c.params.values(name).begin());
    }
    c.algorithm = algorithm_from_json(j.at("algorithm"));
    const auto rng_name = j.at("rng").at("algorithm").get<std::string>();
    if (rng_name != kRngName) throw VersionError("unsupported RNG " + rng_name);
    c.seed = j.at("rng").at("seed").get<std::uint64_t>();
    if (j.contains("history")) {
      for (const auto& h : j.at("history")) {
        c.history.push_back(EpochRecord{h.at("epoch").get<std::size_t>(),
                                        h.at("mean_log_likelihood").get<double>()});
      }
    }
    if (j.contains("generated_by")) c.generated_by = j.at("generated_by");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  }
  return c;
}

inline std::string format_checkpoint(const Checkpoint& c) { return to_json(c).dump(2) + "\n"; }

inline void save_checkpoint(const Checkpoint& c, const std::string& path) {
  write_file(path, format_checkpoint(c));
}

inline Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(parse_json(read_file(path), path));
}

// Copies `c.params` into `store`, which must have identical names and shapes.
inline void restore_params(const Checkpoint& c, ParamStore& store) {
  const auto& want = store.arrays();
  const auto& have = c.params.arrays();
  if (want.size() != have.size()) throw ShapeError("checkpoint parameter count mismatch");
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i].name != have[i].name || want[i].rows != have[i].rows ||
        want[i].cols != have[i].cols) {
      throw ShapeError("checkpoint parameter " + have[i].name + " does not match model");
    }
  }
  store.values() = c.params.values();
}

}  // namespace subgrad
