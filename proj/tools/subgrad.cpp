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

// Command-line driver: dataset generation, training, evaluation, guarantee
// checks, temperature sweeps and distribution enumeration.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subgrad.hpp"

namespace {

using namespace subgrad;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerification = 3;

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SUBGRAD_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw ConfigError("SUBGRAD_SEED is not an unsigned integer: '" + s + "'");
    }
    return v;
  }
  return 0;
}

// Effective flag values of a subcommand, excluding ones that cannot change
// results.
json flags_of(const CLI::App& sub, std::uint64_t seed) {
  json flags = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || opt->get_lnames().empty()) continue;
    const std::string lname = opt->get_lnames().front();
    if (lname == "help" || lname == "threads" || lname == "seed") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < res.size(); ++i) joined += (i ? "," : "") + res[i];
      flags[lname] = joined;
    } else {
      flags[lname] = opt->get_default_str();
    }
  }
  return json{{"tool", "subgrad"}, {"command", sub.get_name()}, {"flags", flags}, {"seed", seed}};
}

// CSV text with a leading comment line recording the generating command.
class Csv {
 public:
  Csv(const json& generated_by, std::vector<std::string> columns) {
    text_ = "# " + generated_by.dump() + "\n";
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  void emit(const std::string& path) const {
    if (path.empty()) {
      std::cout << text_;
    } else {
      write_file(path, text_);
    }
  }

 private:
  std::string text_;
};

// "2^-5..2^3" (integer powers of two) or a comma list of numbers / 2^e terms.
std::vector<double> parse_temperature_list(const std::string& spec) {
  auto parse_term = [&](const std::string& s) -> double {
    if (s.rfind("2^", 0) == 0) {
      int e = 0;
      const auto r = std::from_chars(s.data() + 2, s.data() + s.size(), e);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw ConfigError("bad temperature term '" + s + "'");
      }
      return std::ldexp(1.0, e);
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("bad temperature term '" + s + "'");
    return v;
  };
  std::vector<double> out;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const std::string lo = spec.substr(0, dots);
    const std::string hi = spec.substr(dots + 2);
    if (lo.rfind("2^", 0) != 0 || hi.rfind("2^", 0) != 0) {
      throw ConfigError("temperature ranges must be written 2^a..2^b");
    }
    const int a = static_cast<int>(std::lround(std::log2(parse_term(lo))));
    const int b = static_cast<int>(std::lround(std::log2(parse_term(hi))));
    if (a > b) throw ConfigError("empty temperature range " + spec);
    for (int e = a; e <= b; ++e) out.push_back(std::ldexp(1.0, e));
  } else {
    std::stringstream ss(spec);
    std::string term;
    while (std::getline(ss, term, ',')) out.push_back(parse_term(term));
  }
  if (out.empty()) throw ConfigError("empty temperature list");
  for (double t : out) {
    if (!(t > 0.0)) throw ConfigError("temperatures must be positive");
  }
  return out;
}

std::string subset_cell(const Subset& s) {
  std::string out = "\"{";
  const auto items = s.items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(items[i]);
  }
  return out + "}\"";
}

// ---------------------------------------------------------------------------

struct Common {
  std::optional<std::uint64_t> seed;
  unsigned threads = default_threads();
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "RNG seed (falls back to SUBGRAD_SEED, then 0)");
  sub->add_option("--threads", c.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
}

// gen-maxcut ----------------------------------------------------------------

struct GenMaxcut {
  Common common;
  MaxCutConfig cfg;
  std::string out;
};

void run_gen_maxcut(const CLI::App& sub, GenMaxcut& o) {
  o.cfg.seed = resolve_seed(o.common.seed);
  MaxCutDataset ds = gen_maxcut_dataset(o.cfg, o.common.threads);
  ds.generated_by = flags_of(sub, o.cfg.seed);
  save_maxcut_dataset(ds, o.out);
}

// train-maxcut --------------------------------------------------------------

struct TrainMaxcut {
  Common common;
  std::string train_path;
  std::string test_path;
  std::string link = "g4";
  double t = 0.125;
  TrainConfig train;
  std::string out;
  std::string history;
};

void run_train_maxcut(const CLI::App& sub, TrainMaxcut& o) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  const LinkFunction link = LinkFunction::parse(o.link, o.t);
  if (!link.differentiable()) throw ConfigError("training needs a smooth link (g3 or g4)");
  const MaxCutDataset train_ds = load_maxcut_dataset(o.train_path);
  std::optional<MaxCutDataset> test_ds;
  if (!o.test_path.empty()) {
    test_ds = load_maxcut_dataset(o.test_path);
    if (test_ds->config.d != train_ds.config.d || test_ds->config.k != train_ds.config.k ||
        test_ds->config.gamma != train_ds.config.gamma) {
      throw ShapeError("train and test datasets disagree on d, k or gamma");
    }
  }
  const auto& c = train_ds.config;
  MaxCutProjectionModel model(c.k, c.d, c.gamma);
  init_uniform(model.params(), seed, -0.1, 0.1);
  const AlgorithmSpec spec = DoubleGreedySpec{link, std::nullopt};
  o.train.seed = seed;
  o.train.threads = o.common.threads;
  const auto train_data = train_ds.training_examples();
  std::vector<TrainingExample> test_data;
  if (test_ds) test_data = test_ds->training_examples();

  const json gen = flags_of(sub, seed);
  Csv csv(gen, {"epoch", "train_log_likelihood", "test_log_likelihood"});
  const TrainState state = train(
      model, std::span<const TrainingExample>(train_data), spec, o.train,
      [&](const EpochRecord& rec) {
        std::string test_ll;
        if (!test_data.empty()) {
          test_ll = fmt(mean_log_likelihood(model, std::span<const TrainingExample>(test_data),
                                            spec, seed, o.common.threads));
        }
        csv.row({std::to_string(rec.epoch), fmt(rec.mean_log_likelihood), test_ll});
      });

  Checkpoint ckpt;
  ckpt.model_kind = MaxCutProjectionModel::kKind;
  ckpt.model_config = {{"k", c.k}, {"d", c.d}, {"gamma", c.gamma}};
  ckpt.params = model.params();
  ckpt.algorithm = spec;
  ckpt.seed = seed;
  ckpt.generated_by = gen;
  ckpt.history = state.history;
  save_checkpoint(ckpt, o.out);
  csv.emit(o.history);
}

// eval-maxcut ---------------------------------------------------------------

struct EvalMaxcut {
  Common common;
  std::string ckpt;
  std::string test_path;
  std::vector<std::string> baselines{"original", "random"};
  std::size_t samples = 10;
  bool map = false;
  std::string out;
};

void run_eval_maxcut(const CLI::App& sub, EvalMaxcut& o) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  const Checkpoint ckpt = load_checkpoint(o.ckpt);
  if (ckpt.model_kind != MaxCutProjectionModel::kKind) {
    throw DataError("checkpoint holds a " + ckpt.model_kind + " model, not a max-cut projection");
  }
  const auto* dg = std::get_if<DoubleGreedySpec>(&ckpt.algorithm);
  if (!dg) throw DataError("max-cut checkpoints must use the double greedy algorithm");
  const MaxCutDataset test = load_maxcut_dataset(o.test_path);
  const auto& c = test.config;
  MaxCutProjectionModel model(c.k, c.d, c.gamma);
  restore_params(ckpt, model.params());

  std::vector<std::pair<std::string, std::vector<double>>> projections;
  projections.emplace_back("learned", model.params().values());
  for (const auto& b : o.baselines) {
    if (b == "original") {
      projections.emplace_back(b, coordinate_projection(c.k, c.d));
    } else if (b == "random") {
      projections.emplace_back(b, random_projection(c.k, c.d, seed));
    } else {
      throw ConfigError("unknown baseline '" + b + "'");
    }
  }
  if (!o.map && o.samples == 0) throw ConfigError("--samples must be positive");

  const std::size_t m = test.examples.size();
  const ItemOrder order = dg->order ? *dg->order : ItemOrder::identity(c.n);
  std::vector<std::vector<double>> ratio;
  for (std::size_t p = 0; p < projections.size(); ++p) {
    ratio.push_back(projected_cut_ratios(test, projections[p].second, dg->link, order,
                                         o.map ? 0 : o.samples, seed, p, o.common.threads));
  }

  Csv csv(flags_of(sub, seed),
          {"projection", "mean_cut_ratio", "std_error", "graphs", "samples_per_graph"});
  for (std::size_t p = 0; p < projections.size(); ++p) {
    double mean = 0.0;
    for (double r : ratio[p]) mean += r;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (double r : ratio[p]) var += (r - mean) * (r - mean);
    const double se = m > 1 ? std::sqrt(var / static_cast<double>(m - 1) / static_cast<double>(m)) : 0.0;
    csv.row({projections[p].first, fmt(mean), fmt(se), std::to_string(m),
             o.map ? "map" : std::to_string(o.samples)});
  }
  csv.emit(o.out);
}

// train-flid / eval-flid ------------------------------------------------------

struct TrainFlid {
  Common common;
  std::string data;
  std::string algo = "dgreedy";
  std::size_t dims = 0;
  std::size_t folds = 10;
  std::vector<std::size_t> only_folds;
  std::string link = "g3";
  std::optional<double> t;
  std::size_t exact_max = 5;
  std::size_t perm_samples = 120;
  std::optional<std::size_t> batch;
  TrainConfig train;
  std::string out_dir;
  std::string history;
};

std::string fold_file(const std::string& dir, std::size_t fold, const std::string& kind) {
  return (fs::path(dir) / ("fold" + std::to_string(fold) + "-" + kind + ".json")).string();
}

std::vector<std::size_t> fold_indices(const std::vector<std::size_t>& labels, std::size_t fold,
                                      bool test) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if ((labels[i] == fold) == test) out.push_back(i);
  }
  return out;
}

void run_train_flid(const CLI::App& sub, TrainFlid& o) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  const RegistryDataset ds = load_registries(o.data);
  const std::size_t dims = o.dims ? o.dims : (ds.n <= 40 ? 10 : 20);
  AlgorithmSpec spec;
  if (o.algo == "dgreedy") {
    const LinkFunction link = LinkFunction::parse(o.link, o.t.value_or(1.0));
    if (!link.differentiable()) throw ConfigError("training needs a smooth link (g3 or g4)");
    spec = DoubleGreedySpec{link, order_by_frequency(ds)};
    o.train.batch_size = o.batch.value_or(1);
  } else if (o.algo == "pgreedy") {
    GreedySpec gs;
    gs.temperature = o.t.value_or(0.1);
    gs.approximation = SetLikelihoodMode::random_perm(o.perm_samples);
    gs.approximation.exact_threshold = o.exact_max;
    spec = gs;
    o.train.batch_size = o.batch.value_or(100);
  } else {
    throw ConfigError("--algo must be dgreedy or pgreedy");
  }
  o.train.seed = seed;
  o.train.threads = o.common.threads;
  const auto labels = assign_folds(ds.registries.size(), o.folds, seed);
  std::vector<std::size_t> run_folds = o.only_folds;
  if (run_folds.empty()) {
    for (std::size_t f = 0; f < o.folds; ++f) run_folds.push_back(f);
  }
  fs::create_directories(o.out_dir);
  const json gen = flags_of(sub, seed);
  Csv csv(gen, {"fold", "model", "epoch", "train_log_likelihood"});
  for (std::size_t fold : run_folds) {
    if (fold >= o.folds) throw ConfigError("fold " + std::to_string(fold) + " out of range");
    const auto train_idx = fold_indices(labels, fold, false);
    const auto data = ds.training_examples(train_idx);
    const json config = {{"n", ds.n}, {"D", dims}, {"fold", fold}, {"folds", o.folds},
                         {"fold_seed", seed}};
    auto save = [&](const std::string& kind, const ParamStore& params,
                    const TrainState& st, json cfg) {
      Checkpoint ckpt;
      ckpt.model_kind = kind;
      ckpt.model_config = std::move(cfg);
      ckpt.params = params;
      ckpt.algorithm = spec;
      ckpt.seed = seed;
      ckpt.generated_by = gen;
      ckpt.history = st.history;
      save_checkpoint(ckpt, fold_file(o.out_dir, fold, kind));
      for (const auto& h : st.history) {
        csv.row({std::to_string(fold), kind, std::to_string(h.epoch), fmt(h.mean_log_likelihood)});
      }
    };
    FlidModel flid(ds.n, dims);
    init_uniform(flid.params(), seed + fold, -0.1, 0.1);
    const TrainState fst = train(flid, std::span<const TrainingExample>(data), spec, o.train);
    save(FlidModel::kKind, flid.params(), fst, config);
    ModularModel modular(ds.n);
    const TrainState mst = train(modular, std::span<const TrainingExample>(data), spec, o.train);
    json mcfg = config;
    mcfg.erase("D");
    save(ModularModel::kKind, modular.params(), mst, mcfg);
  }
  csv.emit(o.history);
}

struct EvalFlid {
  Common common;
  std::string ckpts;
  std::string data;
  bool normalized = false;
  std::string out;
};

template <Model M>
SetLogProb model_log_prob(const M& model, const AlgorithmSpec& spec, std::uint64_t seed) {
  return [&model, spec, seed](const Subset& s) {
    const TrainingExample ex{s.ground_size(), 0, {}, s};
    const auto f = model.template function<double>(model.params().values(), ex);
    Rng rng = stream_rng(seed, 0xe7a1, s.count());
    return set_log_likelihood(f, spec, s, &rng);
  };
}

void run_eval_flid(const CLI::App& sub, EvalFlid& o) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  const RegistryDataset ds = load_registries(o.data);
  std::vector<std::size_t> folds;
  for (std::size_t f = 0;; ++f) {
    if (!fs::exists(fold_file(o.ckpts, f, FlidModel::kKind))) break;
    folds.push_back(f);
  }
  if (folds.empty()) throw DataError("no fold checkpoints in " + o.ckpts);
  Csv csv(flags_of(sub, seed),
          {"fold", "test_registries", "flid_log_likelihood", "modular_log_likelihood", "rll",
           "rll_signed", "flid_acc", "modular_acc", "flid_mrr", "modular_mrr"});
  for (std::size_t fold : folds) {
    const Checkpoint fc = load_checkpoint(fold_file(o.ckpts, fold, FlidModel::kKind));
    const Checkpoint mc = load_checkpoint(fold_file(o.ckpts, fold, ModularModel::kKind));
    if (fc.model_config.at("n").get<std::size_t>() != ds.n) {
      throw ShapeError("checkpoint ground set does not match the registry file");
    }
    FlidModel flid(ds.n, fc.model_config.at("D").get<std::size_t>());
    restore_params(fc, flid.params());
    ModularModel modular(ds.n);
    restore_params(mc, modular.params());
    const auto labels = assign_folds(ds.registries.size(),
                                     fc.model_config.at("folds").get<std::size_t>(),
                                     fc.model_config.at("fold_seed").get<std::uint64_t>());
    const auto test_idx = fold_indices(labels, fold, true);
    const auto test = ds.training_examples(test_idx);
    std::vector<Subset> regs;
    for (const auto& ex : test) regs.push_back(ex.target);

    const double fll = mean_log_likelihood(flid, std::span<const TrainingExample>(test),
                                           fc.algorithm, seed, o.common.threads);
    const double mll = mean_log_likelihood(modular, std::span<const TrainingExample>(test),
                                           mc.algorithm, seed, o.common.threads);
    const RelativeLikelihood r = rll(fll, mll);
    const SetLogProb flp = model_log_prob(flid, fc.algorithm, seed);
    const SetLogProb mlp = model_log_prob(modular, mc.algorithm, seed);
    auto acc = [&](const SetLogProb& lp) {
      return fill_in_accuracy(regs, [&](const Subset& s) { return next_item(lp, s); },
                              o.normalized);
    };
    auto rank = [&](const SetLogProb& lp) {
      return mrr(regs, [&](const Subset& s) { return rank_items(lp, s); }, o.normalized);
    };
    csv.row({std::to_string(fold), std::to_string(test.size()), fmt(fll), fmt(mll),
             fmt(r.magnitude), fmt(r.signed_value), fmt(acc(flp)), fmt(acc(mlp)),
             fmt(rank(flp)), fmt(rank(mlp))});
  }
  csv.emit(o.out);
}

// verify-guarantees -----------------------------------------------------------

struct VerifyGuarantees {
  Common common;
  int theorem = 1;
  std::size_t n = 8;
  double eps_frac = 0.05;
  std::size_t runs = 20000;
  std::size_t instances = 1;
  std::string out;
};

void run_verify(const CLI::App& sub, VerifyGuarantees& o) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  if (o.theorem != 1 && o.theorem != 2) throw ConfigError("--theorem must be 1 or 2");
  GuaranteeConfig cfg;
  cfg.theorem = o.theorem == 1 ? Theorem::kHalf : Theorem::kThird;
  cfg.epsilon = o.eps_frac;
  cfg.epsilon_relative = true;
  cfg.num_runs = o.runs;
  cfg.threads = o.common.threads;
  Csv csv(flags_of(sub, seed), {"instance", "n", "opt", "epsilon", "temperature", "runs", "mean",
                                "std_error", "bound", "pass"});
  std::size_t failures = 0;
  for (std::size_t i = 0; i < o.instances; ++i) {
    Rng rng = stream_rng(seed, i, 0xc07);
    const CutFn<double> f = random_cut(o.n, rng);
    cfg.seed = seed + i;
    const GuaranteeReport r = verify_guarantee(f, cfg);
    failures += r.pass ? 0 : 1;
    csv.row({std::to_string(i), std::to_string(r.n), fmt(r.opt_value), fmt(r.epsilon),
             fmt(r.temperature), std::to_string(r.runs), fmt(r.mean), fmt(r.std_error),
             fmt(r.bound), r.pass ? "1" : "0"});
  }
  csv.emit(o.out);
  if (failures) {
    throw VerificationFailure(std::to_string(failures) + " of " + std::to_string(o.instances) +
                              " instances violated the bound");
  }
}

// sweep-temperature -----------------------------------------------------------

struct SweepTemperature {
  Common common;
  std::string train_path;
  std::string t_list = "2^-5..2^3";
  std::string link = "g4";
  TrainConfig train;
  std::string out;
};

void run_sweep(const CLI::App& sub, SweepTemperature& o) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  const auto temps = parse_temperature_list(o.t_list);
  const MaxCutDataset ds = load_maxcut_dataset(o.train_path);
  const auto data = ds.training_examples();
  o.train.seed = seed;
  o.train.threads = o.common.threads;
  Csv csv(flags_of(sub, seed), {"t", "epoch", "train_log_likelihood"});
  for (double t : temps) {
    const LinkFunction link = LinkFunction::parse(o.link, t);
    if (!link.differentiable()) throw ConfigError("sweeps need a smooth link (g3 or g4)");
    MaxCutProjectionModel model(ds.config.k, ds.config.d, ds.config.gamma);
    init_uniform(model.params(), seed, -0.1, 0.1);
    const AlgorithmSpec spec = DoubleGreedySpec{link, std::nullopt};
    const TrainState st = train(model, std::span<const TrainingExample>(data), spec, o.train);
    for (const auto& h : st.history) {
      csv.row({fmt(t), std::to_string(h.epoch), fmt(h.mean_log_likelihood)});
    }
  }
  csv.emit(o.out);
}

// enumerate -------------------------------------------------------------------

struct Enumerate {
  Common common;
  std::string algo = "dgreedy";
  std::string fn = "cut";
  std::size_t n = 6;
  std::size_t k = 2;
  std::size_t dims = 3;
  std::string link = "g3";
  double t = 1.0;
  std::string out;
};

template <SetFunction F>
void enumerate_table(const F& f, const Enumerate& o, Csv& csv) {
  std::vector<DistributionEntry> table;
  if (o.algo == "dgreedy") {
    table = enumerate_double_greedy(f, LinkFunction::parse(o.link, o.t),
                                    ItemOrder::identity(f.size()));
  } else if (o.algo == "pgreedy") {
    table = enumerate_greedy(f, o.k, o.t);
  } else {
    throw ConfigError("--algo must be dgreedy or pgreedy");
  }
  for (const auto& e : table) {
    csv.row({subset_cell(e.set), fmt(e.probability), fmt(value_of(f.evaluate(e.set)))});
  }
}

void run_enumerate(const CLI::App& sub, Enumerate& o) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  if (o.n == 0 || o.n > 10) throw ConfigError("--n must lie in [1, 10]");
  Csv csv(flags_of(sub, seed), {"set", "probability", "value"});
  Rng rng = stream_rng(seed, 0xe0);
  if (o.fn == "cut") {
    enumerate_table(random_cut(o.n, rng), o, csv);
  } else if (o.fn == "flid") {
    enumerate_table(random_flid(o.n, o.dims, rng), o, csv);
  } else if (o.fn == "modular") {
    enumerate_table(random_modular(o.n, rng), o, csv);
  } else if (o.fn == "toy") {
    if (o.n != 2) throw ConfigError("the toy function has n = 2");
    enumerate_table(OrderingToyFn<double>(), o, csv);
  } else {
    throw ConfigError("--fn must be cut, flid, modular or toy");
  }
  csv.emit(o.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentiable greedy submodular maximization"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  GenMaxcut gen;
  auto* gen_cmd = app.add_subcommand("gen-maxcut", "Generate a synthetic max-cut dataset");
  gen_cmd->add_option("--m", gen.cfg.m, "Number of graphs")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n", gen.cfg.n, "Nodes per graph");
  gen_cmd->add_option("--d", gen.cfg.d, "Feature dimension");
  gen_cmd->add_option("--k", gen.cfg.k, "Projected dimension");
  gen_cmd->add_option("--gamma", gen.cfg.gamma, "RBF bandwidth");
  gen_cmd->add_option("--out", gen.out, "Output dataset file")->required();
  add_common(gen_cmd, gen.common);

  TrainMaxcut tm;
  auto* tm_cmd = app.add_subcommand("train-maxcut", "Learn a projection for max-cut");
  tm_cmd->add_option("--train", tm.train_path, "Training dataset")->required()->check(CLI::ExistingFile);
  tm_cmd->add_option("--test", tm.test_path, "Optional test dataset")->check(CLI::ExistingFile);
  tm_cmd->add_option("--link", tm.link, "Link function g3 or g4");
  tm_cmd->add_option("--t", tm.t, "Temperature");
  tm_cmd->add_option("--lr", tm.train.learning_rate, "Adam learning rate");
  tm_cmd->add_option("--lr-decay", tm.train.lr_decay, "Learning-rate decay per epoch");
  tm_cmd->add_option("--weight-decay", tm.train.weight_decay, "Decoupled weight decay");
  tm_cmd->add_option("--batch", tm.train.batch_size, "Batch size");
  tm_cmd->add_option("--epochs", tm.train.epochs, "Epochs");
  tm_cmd->add_option("--out", tm.out, "Output checkpoint")->required();
  tm_cmd->add_option("--history", tm.history, "History CSV (stdout if omitted)");
  add_common(tm_cmd, tm.common);

  EvalMaxcut em;
  auto* em_cmd = app.add_subcommand("eval-maxcut", "Mean cut ratios of learned and baseline projections");
  em_cmd->add_option("--ckpt", em.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  em_cmd->add_option("--test", em.test_path, "Test dataset")->required()->check(CLI::ExistingFile);
  em_cmd->add_option("--baselines", em.baselines, "Comma list of original, random")->delimiter(',');
  em_cmd->add_option("--samples", em.samples, "Sampled cuts per graph");
  em_cmd->add_flag("--map", em.map, "Use the deterministic decision g >= 1/2 instead of sampling");
  em_cmd->add_option("--out", em.out, "Output CSV (stdout if omitted)");
  add_common(em_cmd, em.common);

  TrainFlid tf;
  auto* tf_cmd = app.add_subcommand("train-flid", "Cross-validated FLID and modular training");
  tf_cmd->add_option("--data", tf.data, "Registry file")->required()->check(CLI::ExistingFile);
  tf_cmd->add_option("--algo", tf.algo, "dgreedy or pgreedy");
  tf_cmd->add_option("--D", tf.dims, "Latent dimensions (0: 10 if n <= 40, else 20)");
  tf_cmd->add_option("--folds", tf.folds, "Cross-validation folds");
  tf_cmd->add_option("--fold", tf.only_folds, "Train only these folds")->delimiter(',');
  tf_cmd->add_option("--link", tf.link, "Link for dgreedy (g3 or g4)");
  tf_cmd->add_option("--t", tf.t, "Temperature (default 1 for dgreedy, 0.1 for pgreedy)");
  tf_cmd->add_option("--exact-max", tf.exact_max, "pgreedy: largest set scored exactly");
  tf_cmd->add_option("--perm-samples", tf.perm_samples, "pgreedy: sampled orderings for larger sets");
  tf_cmd->add_option("--batch", tf.batch, "Batch size (default 1 for dgreedy, 100 for pgreedy)");
  tf.train.learning_rate = 0.01;
  tf.train.lr_decay = 0.9;
  tf.train.epochs = 20;
  tf_cmd->add_option("--lr", tf.train.learning_rate, "Adam learning rate");
  tf_cmd->add_option("--lr-decay", tf.train.lr_decay, "Learning-rate decay per epoch");
  tf_cmd->add_option("--weight-decay", tf.train.weight_decay, "Decoupled weight decay");
  tf_cmd->add_option("--epochs", tf.train.epochs, "Epochs");
  tf_cmd->add_option("--out-dir", tf.out_dir, "Checkpoint directory")->required();
  tf_cmd->add_option("--history", tf.history, "History CSV (stdout if omitted)");
  add_common(tf_cmd, tf.common);

  EvalFlid ef;
  auto* ef_cmd = app.add_subcommand("eval-flid", "rLL, fill-in accuracy and MRR per fold");
  ef_cmd->add_option("--ckpts", ef.ckpts, "Checkpoint directory from train-flid")->required()->check(CLI::ExistingDirectory);
  ef_cmd->add_option("--data", ef.data, "Registry file")->required()->check(CLI::ExistingFile);
  ef_cmd->add_flag("--normalized", ef.normalized, "Divide Acc and MRR sums by registry size");
  ef_cmd->add_option("--out", ef.out, "Output CSV (stdout if omitted)");
  add_common(ef_cmd, ef.common);

  VerifyGuarantees vg;
  auto* vg_cmd = app.add_subcommand("verify-guarantees", "Monte-Carlo check of the approximation bounds");
  vg_cmd->add_option("--theorem", vg.theorem, "1: g4 and OPT/2, 2: g3 and OPT/3");
  vg_cmd->add_option("--n", vg.n, "Ground set size");
  vg_cmd->add_option("--eps-frac", vg.eps_frac, "Epsilon as a fraction of OPT");
  vg_cmd->add_option("--runs", vg.runs, "Monte-Carlo runs per instance");
  vg_cmd->add_option("--instances", vg.instances, "Random cut instances");
  vg_cmd->add_option("--out", vg.out, "Output CSV (stdout if omitted)");
  add_common(vg_cmd, vg.common);

  SweepTemperature sw;
  auto* sw_cmd = app.add_subcommand("sweep-temperature", "Train max-cut projections over temperatures");
  sw_cmd->add_option("--train", sw.train_path, "Training dataset")->required()->check(CLI::ExistingFile);
  sw_cmd->add_option("--t-list", sw.t_list, "2^a..2^b or a comma list");
  sw_cmd->add_option("--link", sw.link, "Link function g3 or g4");
  sw_cmd->add_option("--lr", sw.train.learning_rate, "Adam learning rate");
  sw_cmd->add_option("--batch", sw.train.batch_size, "Batch size");
  sw_cmd->add_option("--epochs", sw.train.epochs, "Epochs");
  sw_cmd->add_option("--out", sw.out, "Output CSV (stdout if omitted)");
  add_common(sw_cmd, sw.common);

  Enumerate en;
  auto* en_cmd = app.add_subcommand("enumerate", "Exact output distribution of a small instance");
  en_cmd->add_option("--algo", en.algo, "dgreedy or pgreedy");
  en_cmd->add_option("--fn", en.fn, "cut, flid, modular or toy");
  en_cmd->add_option("--n", en.n, "Ground set size (at most 10)");
  en_cmd->add_option("--k", en.k, "pgreedy cardinality");
  en_cmd->add_option("--D", en.dims, "FLID latent dimensions");
  en_cmd->add_option("--link", en.link, "dgreedy link g1..g4");
  en_cmd->add_option("--t", en.t, "Temperature");
  en_cmd->add_option("--out", en.out, "Output CSV (stdout if omitted)");
  add_common(en_cmd, en.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "subgrad: usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gen_cmd) run_gen_maxcut(*gen_cmd, gen);
    if (*tm_cmd) run_train_maxcut(*tm_cmd, tm);
    if (*em_cmd) run_eval_maxcut(*em_cmd, em);
    if (*tf_cmd) run_train_flid(*tf_cmd, tf);
    if (*ef_cmd) run_eval_flid(*ef_cmd, ef);
    if (*vg_cmd) run_verify(*vg_cmd, vg);
    if (*sw_cmd) run_sweep(*sw_cmd, sw);
    if (*en_cmd) run_enumerate(*en_cmd, en);
  } catch (const VerificationFailure& e) {
    std::cerr << "subgrad: verification failed: " << e.what() << "\n";
    return kExitVerification;
  } catch (const DataError& e) {
    std::cerr << "subgrad: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NonFiniteLikelihood& e) {
    std::cerr << "subgrad: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "subgrad: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::logic_error& e) {
    std::cerr << "subgrad: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "subgrad: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
