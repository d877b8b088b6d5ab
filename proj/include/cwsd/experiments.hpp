// Copyright 2026 The CWSD Authors.
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

// Training-set samplers, the multi-run experiment driver and report
// assembly.
//
// Seeds: run i of an experiment uses seeds[i]; every sampler derives its
// stream from (seed, word), so adding words never changes existing samples.
// Metrics aggregate over runs by mean, sense bias by median.

#pragma once

#include <atomic>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwsd/baseline.hpp"
#include "cwsd/classify.hpp"
#include "cwsd/common.hpp"
#include "cwsd/corpus.hpp"
#include "cwsd/embedding.hpp"
#include "cwsd/evaluate.hpp"
#include "cwsd/sensemodel.hpp"

namespace cwsd {

// --- Samplers -------------------------------------------------------------------

enum class SamplerKind { full, n_shot, fraction, balanced };

struct SamplerSpec {
  SamplerKind kind = SamplerKind::full;
  int n = 1;
  double p = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (kind == SamplerKind::n_shot && n < 1) throw Error("n-shot sampler needs n >= 1");
    if (kind == SamplerKind::fraction && !(p > 0.0 && p <= 1.0))
      throw Error(detail::cat("fraction sampler needs 0 < p <= 1, got ", p));
  }

  // Column label used in sweep tables.
  std::string label() const {
    switch (kind) {
      case SamplerKind::full: return "ALL";
      case SamplerKind::balanced: return "balanced";
      case SamplerKind::n_shot: return detail::cat(n, "-shot");
      case SamplerKind::fraction: {
        if (p >= 1.0) return "ALL";
        std::string s = format_real(round_half_up(100.0 * p, 6));
        return s + "%";
      }
    }
    return "?";
  }

  nlohmann::json to_json() const {
    switch (kind) {
      case SamplerKind::full: return {{"kind", "full"}};
      case SamplerKind::balanced: return {{"kind", "balanced"}};
      case SamplerKind::n_shot: return {{"kind", "n_shot"}, {"n", n}};
      case SamplerKind::fraction: return {{"kind", "fraction"}, {"p", p}};
    }
    return nullptr;
  }

  static SamplerSpec from_json(const nlohmann::json& j) {
    SamplerSpec s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "full") s.kind = SamplerKind::full;
    else if (kind == "balanced") s.kind = SamplerKind::balanced;
    else if (kind == "n_shot") {
      s.kind = SamplerKind::n_shot;
      s.n = j.at("n").get<int>();
    } else if (kind == "fraction") {
      s.kind = SamplerKind::fraction;
      s.p = j.at("p").get<double>();
    } else {
      throw Error(detail::cat("unknown sampler kind '", kind, "'"));
    }
    s.validate();
    return s;
  }

  // "full", "balanced", "nshot:N", "fraction:P".
  static SamplerSpec parse(std::string_view text) {
    SamplerSpec s;
    try {
      if (text == "full") s.kind = SamplerKind::full;
      else if (text == "balanced") s.kind = SamplerKind::balanced;
      else if (text.starts_with("nshot:")) {
        s.kind = SamplerKind::n_shot;
        s.n = std::stoi(std::string(text.substr(6)));
      } else if (text.starts_with("fraction:")) {
        s.kind = SamplerKind::fraction;
        s.p = std::stod(std::string(text.substr(9)));
      } else {
        throw Error(detail::cat("unknown sampler '", text, "'"));
      }
    } catch (const std::logic_error&) {
      throw Error(detail::cat("malformed sampler '", text, "'"));
    }
    s.validate();
    return s;
  }
};

// Sampled train instance ids in train-list order; nullopt marks a skip.
using Sample = std::optional<std::vector<std::string>>;

namespace detail {

inline std::vector<std::vector<std::size_t>> positions_by_class(const WordDataset& ds) {
  std::vector<std::vector<std::size_t>> by(static_cast<std::size_t>(ds.polysemy()));
  for (std::size_t i = 0; i < ds.train.size(); ++i) by.at(static_cast<std::size_t>(ds.train[i].gold)).push_back(i);
  return by;
}

// Draws `take` of `pool` without replacement (partial Fisher-Yates).
inline void draw(Rng& rng, std::vector<std::size_t> pool, std::size_t take, std::vector<std::size_t>& out) {
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + rng.index(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
}

inline std::vector<std::string> ids_in_order(const WordDataset& ds, std::vector<std::size_t> positions) {
  std::sort(positions.begin(), positions.end());
  std::vector<std::string> ids;
  ids.reserve(positions.size());
  for (auto p : positions) ids.push_back(ds.train[p].instance_id);
  return ids;
}

}  // namespace detail

// Exactly n train instances per sense, or a skip when any sense has fewer.
inline Sample sample_nshot(const WordDataset& ds, int n, std::uint64_t seed) {
  if (n < 1) throw Error("sample_nshot: n must be >= 1");
  auto by = detail::positions_by_class(ds);
  for (const auto& c : by) {
    if (c.size() < static_cast<std::size_t>(n)) return std::nullopt;
  }
  Rng rng(derive_seed(seed, ds.word));
  std::vector<std::size_t> chosen;
  for (auto& c : by) detail::draw(rng, c, static_cast<std::size_t>(n), chosen);
  return detail::ids_in_order(ds, std::move(chosen));
}

// Per sense, max(1, round_half_up(p * count)) instances (none for an empty
// sense).
inline std::size_t fraction_take(double p, std::size_t count) {
  if (count == 0) return 0;
  auto take = static_cast<std::size_t>(round_half_up(p * static_cast<double>(count)));
  return std::clamp<std::size_t>(take, 1, count);
}

inline Sample sample_fraction(const WordDataset& ds, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(detail::cat("sample_fraction: p must be in (0, 1], got ", p));
  auto by = detail::positions_by_class(ds);
  Rng rng(derive_seed(seed, ds.word));
  std::vector<std::size_t> chosen;
  for (auto& c : by) detail::draw(rng, c, fraction_take(p, c.size()), chosen);
  return detail::ids_in_order(ds, std::move(chosen));
}

// Every sense cut down to the smallest sense count.
inline Sample sample_balanced(const WordDataset& ds, std::uint64_t seed) {
  auto by = detail::positions_by_class(ds);
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (std::size_t c = 0; c < by.size(); ++c) {
    if (by[c].empty())
      throw Error(detail::cat(ds.word, ": sense '", ds.senses[c].sense_id, "' has no train instances to balance"));
    m = std::min(m, by[c].size());
  }
  Rng rng(derive_seed(seed, ds.word));
  std::vector<std::size_t> chosen;
  for (auto& c : by) detail::draw(rng, c, m, chosen);
  return detail::ids_in_order(ds, std::move(chosen));
}

inline Sample sample(const WordDataset& ds, const SamplerSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case SamplerKind::full: {
      std::vector<std::string> ids;
      for (const auto& inst : ds.train) ids.push_back(inst.instance_id);
      return ids;
    }
    case SamplerKind::n_shot: return sample_nshot(ds, spec.n, spec.seed);
    case SamplerKind::fraction: return sample_fraction(ds, spec.p, spec.seed);
    case SamplerKind::balanced: return sample_balanced(ds, spec.seed);
  }
  return std::nullopt;
}

// --- Experiment specification ---------------------------------------------------

struct KnnConfig {
  PoolingSpec pooling = default_pooling();
  std::optional<double> threshold;
};

struct LinearConfig {
  LinearHyper hyper;
  FeatureMode mode = FeatureMode::sentence_mean;
  std::size_t dim = 100;
  // External vector table; random per-run vectors when absent.
  std::optional<std::string> vectors;
};

enum class ClassifierKind { knn, linear };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::knn;
  KnnConfig knn;
  LinearConfig linear;
};

struct ExperimentSpec {
  std::string name = "experiment";
  // Empty means every word under the data root.
  std::vector<std::string> words;
  // More than one sampler makes a sweep.
  std::vector<SamplerSpec> samplers{SamplerSpec{}};
  ClassifierSpec classifier;
  int runs = 1;
  std::vector<std::uint64_t> seeds{0};
  Split eval_split = Split::test;

  void validate() const {
    if (runs < 1) throw Error("experiment: runs must be >= 1");
    if (seeds.size() != static_cast<std::size_t>(runs))
      throw Error(detail::cat("experiment: ", seeds.size(), " seeds for ", runs, " runs"));
    if (samplers.empty()) throw Error("experiment: no sampler");
    for (const auto& s : samplers) s.validate();
    if (classifier.kind == ClassifierKind::knn) classifier.knn.pooling.validate();
    if (classifier.kind == ClassifierKind::linear) {
      if (classifier.linear.dim == 0) throw Error("experiment: linear dim must be positive");
      if (classifier.linear.hyper.batch == 0) throw Error("experiment: linear batch must be positive");
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json sampler_json;
    if (samplers.size() == 1) {
      sampler_json = samplers.front().to_json();
    } else {
      sampler_json = nlohmann::json::array();
      for (const auto& s : samplers) sampler_json.push_back(s.to_json());
    }
    nlohmann::json clf;
    if (classifier.kind == ClassifierKind::knn) {
      clf = {{"kind", "knn"},
             {"pooling", classifier.knn.pooling.to_string()},
             {"threshold", optional_json(classifier.knn.threshold)}};
    } else {
      const auto& l = classifier.linear;
      clf = {{"kind", "linear"},       {"lr", l.hyper.lr},
             {"epochs", l.hyper.epochs}, {"l2", l.hyper.l2},
             {"batch", l.hyper.batch},   {"dim", l.dim},
             {"feature_mode", feature_mode_name(l.mode)},
             {"vectors", l.vectors ? nlohmann::json(*l.vectors) : nlohmann::json(nullptr)}};
    }
    return {{"name", name},     {"words", words}, {"sampler", sampler_json}, {"classifier", clf},
            {"runs", runs},     {"seeds", seeds}, {"eval_split", split_name(eval_split)}};
  }

  static ExperimentSpec from_json(const nlohmann::json& j) {
    try {
      ExperimentSpec s;
      s.name = j.value("name", std::string("experiment"));
      s.words = j.value("words", std::vector<std::string>{});
      s.samplers.clear();
      if (!j.contains("sampler")) {
        s.samplers.push_back({});
      } else if (j.at("sampler").is_array()) {
        for (const auto& sj : j.at("sampler")) s.samplers.push_back(SamplerSpec::from_json(sj));
      } else {
        s.samplers.push_back(SamplerSpec::from_json(j.at("sampler")));
      }
      if (j.contains("classifier")) {
        const auto& c = j.at("classifier");
        const auto kind = c.at("kind").get<std::string>();
        if (kind == "knn") {
          s.classifier.kind = ClassifierKind::knn;
          if (c.contains("pooling")) s.classifier.knn.pooling = PoolingSpec::parse(c.at("pooling").get<std::string>());
          if (c.contains("threshold") && !c.at("threshold").is_null())
            s.classifier.knn.threshold = c.at("threshold").get<double>();
        } else if (kind == "linear") {
          s.classifier.kind = ClassifierKind::linear;
          auto& l = s.classifier.linear;
          l.hyper.lr = c.value("lr", l.hyper.lr);
          l.hyper.epochs = c.value("epochs", l.hyper.epochs);
          l.hyper.l2 = c.value("l2", l.hyper.l2);
          l.hyper.batch = c.value("batch", l.hyper.batch);
          l.dim = c.value("dim", l.dim);
          if (c.contains("feature_mode")) l.mode = parse_feature_mode(c.at("feature_mode").get<std::string>());
          if (c.contains("vectors") && !c.at("vectors").is_null()) l.vectors = c.at("vectors").get<std::string>();
        } else {
          throw Error(detail::cat("unknown classifier kind '", kind, "'"));
        }
      }
      s.runs = j.value("runs", 1);
      if (j.contains("seeds")) {
        s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
      } else {
        s.seeds.clear();
        for (int i = 0; i < s.runs; ++i) s.seeds.push_back(static_cast<std::uint64_t>(i));
      }
      if (j.contains("eval_split")) s.eval_split = parse_split(j.at("eval_split").get<std::string>());
      s.validate();
      return s;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(detail::cat("experiment spec: ", e.what()));
    }
  }

  // Stable digest of the canonical (key-sorted) JSON form.
  std::string digest() const { return hex64(fnv1a64(to_json().dump())); }
};

// --- Driver -------------------------------------------------------------------------

// Embeddings covering a word's train and evaluation instances.
using EmbeddingLookup = std::function<const EmbeddingStore&(const std::string& word)>;

struct RunResult {
  std::string word;
  int run = 0;
  std::uint64_t seed = 0;
  bool skipped = false;
  std::size_t train_size = 0;
  ConfusionMatrix cm;
  MetricsReport metrics;
};

struct WordAggregate {
  std::string word;
  int runs_completed = 0;
  bool skipped = false;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> mfs_f1;
  std::optional<double> lfs_f1;
  std::optional<BiasReport> bias;
};

struct ExperimentResult {
  SamplerSpec sampler;
  std::vector<RunResult> runs;
  std::vector<WordAggregate> words;
  // Means over the words that were not skipped.
  double mean_micro_f1 = 0.0;
  double mean_macro_f1 = 0.0;
  std::optional<double> mean_mfs_f1;
  std::optional<double> mean_lfs_f1;
  std::optional<double> mean_bias;
};

namespace detail {

// Runs fn(i) for i in [0, n) on up to `threads` workers.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> futures;
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    }));
  }
  for (auto& f : futures) f.get();
}

inline RunResult run_single(const WordDataset& ds, const ExperimentSpec& spec, const SamplerSpec& base_sampler,
                            int run, const EmbeddingLookup& lookup, const TokenVectors* external) {
  RunResult r;
  r.word = ds.word;
  r.run = run;
  r.seed = spec.seeds[static_cast<std::size_t>(run)];
  SamplerSpec sampler = base_sampler;
  sampler.seed = r.seed;
  Sample ids = sample(ds, sampler);
  if (!ids) {
    r.skipped = true;
    return r;
  }
  r.train_size = ids->size();
  const auto& eval = ds.instances(spec.eval_split);
  if (eval.empty()) throw Error(detail::cat(ds.word, ": ", split_name(spec.eval_split), " split is empty"));
  std::vector<int> gold, pred;
  for (const auto& inst : eval) gold.push_back(inst.gold);

  if (spec.classifier.kind == ClassifierKind::knn) {
    const EmbeddingStore& store = lookup(ds.word);
    InstanceIdSet subset(ids->begin(), ids->end());
    SenseTable table = build_sense_table(ds, store, spec.classifier.knn.pooling, &subset);
    for (const auto& p : classify_split(ds, store, table, spec.eval_split, spec.classifier.knn.threshold))
      pred.push_back(p.predicted);
  } else {
    const auto& cfg = spec.classifier.linear;
    std::unordered_set<std::string> keep(ids->begin(), ids->end());
    std::vector<const Instance*> selection;
    for (const auto& inst : ds.train)
      if (keep.count(inst.instance_id)) selection.push_back(&inst);
    std::optional<TokenVectors> random;
    if (!external) random = TokenVectors::random_init(ds, cfg.dim, derive_seed(r.seed, ds.word + "/vectors"));
    const TokenVectors& source = external ? *external : *random;
    LinearHyper hyper = cfg.hyper;
    hyper.seed = derive_seed(r.seed, ds.word + "/train");
    LinearModel model = train_linear(ds, source, cfg.mode, hyper, nullptr, &selection);
    for (const auto& inst : eval) pred.push_back(predict_linear(model, inst, source).predicted);
  }
  r.cm = confusion(gold, pred, ds.polysemy());
  r.metrics = metrics(r.cm, frequency_roles(ds));
  return r;
}

inline std::optional<double> mean_of(const std::vector<std::optional<double>>& xs) {
  double s = 0.0;
  int n = 0;
  for (const auto& x : xs) {
    if (!x) continue;
    s += *x;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return s / n;
}

}  // namespace detail

inline ExperimentResult run_experiment_with(const ExperimentSpec& spec, const SamplerSpec& sampler,
                                            const std::vector<WordDataset>& datasets, const EmbeddingLookup& lookup,
                                            int threads = 1) {
  spec.validate();
  std::optional<TokenVectors> external;
  if (spec.classifier.kind == ClassifierKind::linear && spec.classifier.linear.vectors)
    external = TokenVectors::load_text(*spec.classifier.linear.vectors);

  ExperimentResult res;
  res.sampler = sampler;
  const std::size_t runs = static_cast<std::size_t>(spec.runs);
  res.runs.resize(datasets.size() * runs);
  detail::parallel_for(res.runs.size(), threads, [&](std::size_t task) {
    const auto& ds = datasets[task / runs];
    res.runs[task] = detail::run_single(ds, spec, sampler, static_cast<int>(task % runs), lookup,
                                        external ? &*external : nullptr);
  });

  std::vector<std::optional<double>> micro, macro, mfs, lfs, bias;
  for (std::size_t w = 0; w < datasets.size(); ++w) {
    WordAggregate agg;
    agg.word = datasets[w].word;
    std::vector<ConfusionMatrix> cms;
    std::vector<std::optional<double>> r_mfs, r_lfs;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto& rr = res.runs[w * runs + r];
      if (rr.skipped) continue;
      ++agg.runs_completed;
      agg.micro_f1 += rr.metrics.micro_f1;
      agg.macro_f1 += rr.metrics.macro_f1;
      r_mfs.push_back(rr.metrics.mfs_f1);
      r_lfs.push_back(rr.metrics.lfs_f1);
      cms.push_back(rr.cm);
    }
    if (agg.runs_completed == 0) {
      agg.skipped = true;
    } else {
      agg.micro_f1 /= agg.runs_completed;
      agg.macro_f1 /= agg.runs_completed;
      agg.mfs_f1 = detail::mean_of(r_mfs);
      agg.lfs_f1 = detail::mean_of(r_lfs);
      agg.bias = sense_bias(cms);
      micro.push_back(agg.micro_f1);
      macro.push_back(agg.macro_f1);
      mfs.push_back(agg.mfs_f1);
      lfs.push_back(agg.lfs_f1);
      bias.push_back(agg.bias->bias);
    }
    res.words.push_back(std::move(agg));
  }
  res.mean_micro_f1 = detail::mean_of(micro).value_or(0.0);
  res.mean_macro_f1 = detail::mean_of(macro).value_or(0.0);
  res.mean_mfs_f1 = detail::mean_of(mfs);
  res.mean_lfs_f1 = detail::mean_of(lfs);
  res.mean_bias = detail::mean_of(bias);
  return res;
}

// One result per sampler in the spec.
inline std::vector<ExperimentResult> run_experiment(const ExperimentSpec& spec, const std::vector<WordDataset>& datasets,
                                                    const EmbeddingLookup& lookup, int threads = 1) {
  std::vector<ExperimentResult> out;
  for (const auto& s : spec.samplers) out.push_back(run_experiment_with(spec, s, datasets, lookup, threads));
  return out;
}

// --- Report assembly -------------------------------------------------------------

struct ReportOptions {
  std::optional<std::string> timestamp;
};

inline nlohmann::json experiment_json(const ExperimentSpec& spec, const std::vector<ExperimentResult>& results,
                                      const ReportOptions& opts = {}) {
  const std::string digest = spec.digest();
  nlohmann::json j = {{"name", spec.name}, {"config_digest", digest}, {"config", spec.to_json()}};
  if (opts.timestamp) j["generated_at"] = *opts.timestamp;
  auto& arr = j["results"] = nlohmann::json::array();
  for (const auto& res : results) {
    nlohmann::json rj = {{"sampler", res.sampler.to_json()}, {"label", res.sampler.label()}};
    auto& words = rj["words"] = nlohmann::json::array();
    std::size_t runs = static_cast<std::size_t>(spec.runs);
    for (std::size_t w = 0; w < res.words.size(); ++w) {
      const auto& agg = res.words[w];
      nlohmann::json wj = {{"word", agg.word}, {"status", agg.skipped ? "skipped" : "ok"}};
      auto& rs = wj["runs"] = nlohmann::json::array();
      for (std::size_t r = 0; r < runs; ++r) {
        const auto& rr = res.runs[w * runs + r];
        nlohmann::json one = {{"run", rr.run}, {"seed", rr.seed}, {"status", rr.skipped ? "skipped" : "ok"}};
        if (!rr.skipped) {
          one["train_size"] = rr.train_size;
          one["report"] = report_json(rr.word, digest, rr.metrics, rr.cm, std::nullopt);
        }
        rs.push_back(one);
      }
      if (!agg.skipped) {
        wj["aggregate"] = {{"micro_f1", agg.micro_f1},
                           {"macro_f1", agg.macro_f1},
                           {"mfs_f1", optional_json(agg.mfs_f1)},
                           {"lfs_f1", optional_json(agg.lfs_f1)},
                           {"bias", {{"per_sense", agg.bias->per_sense},
                                     {"max", agg.bias->bias},
                                     {"runs_aggregated", agg.bias->runs_aggregated}}}};
      }
      words.push_back(wj);
    }
    rj["mean"] = {{"micro_f1", res.mean_micro_f1},
                  {"macro_f1", res.mean_macro_f1},
                  {"mfs_f1", optional_json(res.mean_mfs_f1)},
                  {"lfs_f1", optional_json(res.mean_lfs_f1)},
                  {"bias", optional_json(res.mean_bias)}};
    arr.push_back(rj);
  }
  return j;
}

inline std::string runs_csv(const std::vector<ExperimentResult>& results) {
  std::string out = "sampler,word,run,seed,status,train_size,micro_f1,macro_f1,mfs_f1,lfs_f1\n";
  auto opt = [](const std::optional<double>& v) { return v ? percent(*v) : std::string(); };
  for (const auto& res : results) {
    for (const auto& rr : res.runs) {
      out += detail::cat(res.sampler.label(), ',', rr.word, ',', rr.run, ',', rr.seed, ',');
      if (rr.skipped) {
        out += "skipped,,,,,\n";
        continue;
      }
      out += detail::cat("ok,", rr.train_size, ',', percent(rr.metrics.micro_f1), ',', percent(rr.metrics.macro_f1),
                         ',', opt(rr.metrics.mfs_f1), ',', opt(rr.metrics.lfs_f1), '\n');
    }
  }
  return out;
}

inline std::string summary_csv(const std::vector<ExperimentResult>& results) {
  std::string out = "sampler,word,status,micro_f1,macro_f1,mfs_f1,lfs_f1,bias\n";
  auto opt = [](const std::optional<double>& v) { return v ? percent(*v) : std::string(); };
  for (const auto& res : results) {
    const std::string label = res.sampler.label();
    for (const auto& agg : res.words) {
      if (agg.skipped) {
        out += detail::cat(label, ',', agg.word, ",skipped,,,,,\n");
        continue;
      }
      out += detail::cat(label, ',', agg.word, ",ok,", percent(agg.micro_f1), ',', percent(agg.macro_f1), ',',
                         opt(agg.mfs_f1), ',', opt(agg.lfs_f1), ',', format_fixed(agg.bias->bias, 2), '\n');
    }
    out += detail::cat(label, ",AVG,ok,", percent(res.mean_micro_f1), ',', percent(res.mean_macro_f1), ',',
                       opt(res.mean_mfs_f1), ',', opt(res.mean_lfs_f1), ',',
                       res.mean_bias ? format_fixed(*res.mean_bias, 2) : std::string(), '\n');
  }
  return out;
}

enum class TableMetric { micro_f1, macro_f1, mfs_f1, lfs_f1 };

// Word x sampler table, one column per sweep point (e.g. 1% 5% ... ALL);
// skipped cells print "-".
inline std::string sweep_table_csv(const std::vector<ExperimentResult>& results, TableMetric metric) {
  std::string out = "word";
  for (const auto& r : results) out += "," + r.sampler.label();
  out += '\n';
  if (results.empty()) return out;
  auto cell = [&](const WordAggregate& a) -> std::string {
    if (a.skipped) return "-";
    std::optional<double> v;
    switch (metric) {
      case TableMetric::micro_f1: v = a.micro_f1; break;
      case TableMetric::macro_f1: v = a.macro_f1; break;
      case TableMetric::mfs_f1: v = a.mfs_f1; break;
      case TableMetric::lfs_f1: v = a.lfs_f1; break;
    }
    return v ? percent(*v) : std::string("-");
  };
  for (std::size_t w = 0; w < results.front().words.size(); ++w) {
    out += results.front().words[w].word;
    for (const auto& r : results) out += "," + cell(r.words[w]);
    out += '\n';
  }
  out += "AVG";
  for (const auto& r : results) {
    std::optional<double> v;
    switch (metric) {
      case TableMetric::micro_f1: v = r.mean_micro_f1; break;
      case TableMetric::macro_f1: v = r.mean_macro_f1; break;
      case TableMetric::mfs_f1: v = r.mean_mfs_f1; break;
      case TableMetric::lfs_f1: v = r.mean_lfs_f1; break;
    }
    out += "," + (v ? percent(*v) : std::string("-"));
  }
  out += '\n';
  return out;
}

inline void write_experiment_reports(const std::filesystem::path& dir, const ExperimentSpec& spec,
                                     const std::vector<ExperimentResult>& results, const ReportOptions& opts = {}) {
  write_file_atomic(dir / "report.json", experiment_json(spec, results, opts).dump(2) + "\n");
  write_file_atomic(dir / "runs.csv", runs_csv(results));
  write_file_atomic(dir / "summary.csv", summary_csv(results));
  write_file_atomic(dir / "table_micro.csv", sweep_table_csv(results, TableMetric::micro_f1));
  write_file_atomic(dir / "table_macro.csv", sweep_table_csv(results, TableMetric::macro_f1));
  write_file_atomic(dir / "table_mfs.csv", sweep_table_csv(results, TableMetric::mfs_f1));
  write_file_atomic(dir / "table_lfs.csv", sweep_table_csv(results, TableMetric::lfs_f1));
}

// --- Layer sweep --------------------------------------------------------------------

struct LayerPoint {
  int layer = 0;
  // Mean over words.
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
};

// Full-train 1NN with single-layer pooling for each requested layer.
inline std::vector<LayerPoint> layer_sweep(const std::vector<WordDataset>& datasets, const EmbeddingLookup& lookup,
                                           const std::vector<int>& layers, Split eval_split = Split::test,
                                           int threads = 1) {
  if (datasets.empty()) throw Error("layer_sweep: no datasets");
  std::vector<LayerPoint> out(layers.size());
  std::vector<std::pair<double, double>> cells(layers.size() * datasets.size());
  detail::parallel_for(cells.size(), threads, [&](std::size_t task) {
    const int layer = layers[task / datasets.size()];
    const auto& ds = datasets[task % datasets.size()];
    const EmbeddingStore& store = lookup(ds.word);
    auto avail = store.layers();
    if (std::find(avail.begin(), avail.end(), layer) == avail.end())
      throw Error(detail::cat(ds.word, ": layer ", layer, " missing from the embedding cache"));
    SenseTable table = build_sense_table(ds, store, PoolingSpec::single(layer));
    std::vector<int> gold, pred;
    for (const auto& p : classify_split(ds, store, table, eval_split)) pred.push_back(p.predicted);
    for (const auto& inst : ds.instances(eval_split)) gold.push_back(inst.gold);
    auto m = metrics(confusion(gold, pred, ds.polysemy()));
    cells[task] = {m.micro_f1, m.macro_f1};
  });
  for (std::size_t l = 0; l < layers.size(); ++l) {
    out[l].layer = layers[l];
    for (std::size_t w = 0; w < datasets.size(); ++w) {
      out[l].micro_f1 += cells[l * datasets.size() + w].first;
      out[l].macro_f1 += cells[l * datasets.size() + w].second;
    }
    out[l].micro_f1 /= static_cast<double>(datasets.size());
    out[l].macro_f1 /= static_cast<double>(datasets.size());
  }
  return out;
}

inline std::string layer_sweep_csv(const std::vector<LayerPoint>& points) {
  std::string out = "layer,f1\n";
  for (const auto& p : points) out += detail::cat(p.layer, ',', percent(p.micro_f1), '\n');
  return out;
}

}  // namespace cwsd
