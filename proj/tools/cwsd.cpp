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

// cwsd: command-line entry point.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "cwsd/cwsd.hpp"
#include "cwsd/embedding_client.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalConfig {
  std::string data_root;
  std::string cache_dir = "cache";
  std::string provider_url;
  std::string pooling = "sum:last4";
  int threads = 1;
  std::string log_level = "info";
  bool no_timestamp = false;
};

// cwsd.json in the working directory, then CWSD_DATA_ROOT for the data
// root; command-line flags override both.
GlobalConfig load_config_defaults() {
  GlobalConfig cfg;
  if (const char* env = std::getenv("CWSD_DATA_ROOT")) cfg.data_root = env;
  if (fs::exists("cwsd.json")) {
    json j;
    try {
      j = json::parse(cwsd::read_file("cwsd.json"));
    } catch (const json::exception& e) {
      throw cwsd::FormatError(std::string("cwsd.json: ") + e.what());
    }
    cfg.data_root = j.value("data_root", cfg.data_root);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    cfg.provider_url = j.value("provider_url", cfg.provider_url);
    cfg.pooling = j.value("pooling", cfg.pooling);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.log_level = j.value("log_level", cfg.log_level);
  }
  return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  for (auto& part : cwsd::split_string(s, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::vector<int> parse_layers(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split_list(s)) {
    try {
      out.push_back(std::stoi(part));
    } catch (const std::logic_error&) {
      throw cwsd::Error("malformed layer index '" + part + "'");
    }
  }
  return out;
}

std::string now_iso8601() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    cwsd::write_file_atomic(out_path, text);
    spdlog::info("wrote {}", out_path);
  }
}

class App {
 public:
  explicit App(GlobalConfig cfg) : cfg_(std::move(cfg)) {}

  GlobalConfig& cfg() { return cfg_; }

  void setup() {
    spdlog::set_default_logger(spdlog::stderr_logger_mt("cwsd"));
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::from_str(cfg_.log_level));
    if (cfg_.threads < 1) throw cwsd::Error("--threads must be >= 1");
  }

  fs::path data_root() const {
    if (cfg_.data_root.empty())
      throw cwsd::Error("no data root: pass --data-root, set CWSD_DATA_ROOT or add data_root to cwsd.json");
    return cfg_.data_root;
  }

  std::vector<std::string> resolve_words(const std::vector<std::string>& requested) const {
    return requested.empty() ? cwsd::list_words(data_root()) : requested;
  }

  cwsd::WordDataset load(const std::string& word) const {
    auto ds = cwsd::load_word_dataset(data_root(), word);
    for (const auto& w : ds.warnings) spdlog::warn("{}", w);
    return ds;
  }

  cwsd::EmbeddingStore load_store(const cwsd::WordDataset& ds, std::initializer_list<cwsd::Split> splits) const {
    cwsd::EmbeddingStore store;
    for (auto s : splits) {
      if (ds.instances(s).empty()) continue;
      auto path = cwsd::cache_path(cfg_.cache_dir, ds.word, s);
      if (!fs::exists(path))
        throw cwsd::Error("missing embedding cache " + path.string() + " (run `cwsd ingest` first)");
      store.merge(cwsd::EmbeddingStore(cwsd::read_cache(path)));
    }
    return store;
  }

  cwsd::PoolingSpec pooling(const std::string& override_text) const {
    return cwsd::PoolingSpec::parse(override_text.empty() ? cfg_.pooling : override_text);
  }

  std::optional<std::string> timestamp() const {
    if (cfg_.no_timestamp) return std::nullopt;
    return now_iso8601();
  }

  json config_json() const {
    return {{"data_root", cfg_.data_root}, {"cache_dir", cfg_.cache_dir}, {"provider_url", cfg_.provider_url},
            {"pooling", cfg_.pooling},     {"threads", cfg_.threads}};
  }

 private:
  GlobalConfig cfg_;
};

// --- stats ----------------------------------------------------------------------

struct StatsArgs {
  std::string words, out;
};

void cmd_stats(App& app, const StatsArgs& a) {
  std::string csv = cwsd::stats_csv_header();
  for (const auto& w : app.resolve_words(split_list(a.words))) csv += cwsd::stats_csv_row(cwsd::word_stats(app.load(w)));
  emit(a.out, csv);
}

// --- ingest ---------------------------------------------------------------------

struct IngestArgs {
  std::string words, splits = "train,test,ood_test", layers = "all";
  std::size_t batch_size = 32;
  int retries = 3;
};

void cmd_ingest(App& app, const IngestArgs& a) {
  if (app.cfg().provider_url.empty()) throw cwsd::Error("ingest needs --provider-url");
  cwsd::LayerSelection layers;
  if (a.layers != "all") layers = parse_layers(a.layers);
  cwsd::FetchOptions opts;
  opts.batch_size = a.batch_size;
  opts.retries = a.retries;
  opts.threads = app.cfg().threads;
  for (const auto& w : app.resolve_words(split_list(a.words))) {
    auto ds = app.load(w);
    for (const auto& sname : split_list(a.splits)) {
      auto split = cwsd::parse_split(sname);
      const auto& insts = ds.instances(split);
      if (insts.empty()) continue;
      auto fetched = cwsd::fetch_embeddings(app.cfg().provider_url, insts, layers, opts);
      std::vector<cwsd::InstanceEmbedding> kept;
      std::string truncated;
      for (auto& e : fetched) {
        if (e.truncated) {
          truncated += e.instance_id + "\n";
          continue;
        }
        kept.push_back(std::move(e));
      }
      auto path = cwsd::cache_path(app.cfg().cache_dir, w, split);
      cwsd::write_cache(path, kept);
      spdlog::info("{}: cached {} {} embeddings in {}", w, kept.size(), sname, path.string());
      if (!truncated.empty()) {
        fs::path tpath = path;
        tpath.replace_extension(".truncated.txt");
        cwsd::write_file_atomic(tpath, truncated);
        spdlog::warn("{}: {} {} instance(s) lost their target to truncation, listed in {}", w,
                     fetched.size() - kept.size(), sname, tpath.string());
      }
    }
  }
}

// --- build-senses / classify ------------------------------------------------------

struct SenseArgs {
  std::string word, pooling, sampler = "full", out;
  std::uint64_t seed = 0;
};

cwsd::SenseTable build_table(App& app, const cwsd::WordDataset& ds, const cwsd::EmbeddingStore& store,
                             const std::string& pooling, const std::string& sampler_text, std::uint64_t seed) {
  auto sampler = cwsd::SamplerSpec::parse(sampler_text);
  sampler.seed = seed;
  auto ids = cwsd::sample(ds, sampler);
  if (!ids) throw cwsd::Error(ds.word + ": sampler '" + sampler_text + "' cannot be satisfied (a sense has too few instances)");
  cwsd::InstanceIdSet subset(ids->begin(), ids->end());
  return cwsd::build_sense_table(ds, store, app.pooling(pooling), &subset);
}

void cmd_build_senses(App& app, const SenseArgs& a) {
  auto ds = app.load(a.word);
  auto store = app.load_store(ds, {cwsd::Split::train});
  auto table = build_table(app, ds, store, a.pooling, a.sampler, a.seed);
  fs::path prefix = a.out.empty() ? fs::path(app.cfg().cache_dir) / "senses" / a.word : fs::path(a.out);
  cwsd::write_sense_table(prefix, table);
  spdlog::info("{}: {} centroids, mfs {}, written to {}.{{cwse,json}}", a.word, table.centroids.size(), table.mfs,
               prefix.string());
}

struct ClassifyArgs {
  std::string word, split = "test", pooling, sampler = "full", senses, out, sweep_out, similarities_out;
  std::optional<double> threshold;
  std::uint64_t seed = 0;
};

void cmd_classify(App& app, const ClassifyArgs& a) {
  auto ds = app.load(a.word);
  auto split = cwsd::parse_split(a.split);
  cwsd::SenseTable table;
  cwsd::EmbeddingStore store;
  if (!a.senses.empty()) {
    table = cwsd::read_sense_table(a.senses);
    store = app.load_store(ds, {split});
  } else {
    store = app.load_store(ds, {cwsd::Split::train, split});
    table = build_table(app, ds, store, a.pooling, a.sampler, a.seed);
  }
  auto preds = cwsd::classify_split(ds, store, table, split, a.threshold);
  std::vector<int> gold;
  for (const auto& inst : ds.instances(split)) gold.push_back(inst.gold);
  emit(a.out, cwsd::predictions_csv(preds, gold));
  if (!a.sweep_out.empty() || !a.similarities_out.empty()) {
    auto rep = cwsd::similarity_report(preds, gold);
    if (!a.sweep_out.empty()) emit(a.sweep_out, cwsd::sweep_csv(rep));
    if (!a.similarities_out.empty()) emit(a.similarities_out, cwsd::similarities_csv(rep));
  }
}

// --- evaluate / bias ---------------------------------------------------------------

struct EvaluateArgs {
  std::string predictions, gold, word, out, csv_out;
  std::optional<int> k, mfs, lfs;
};

void cmd_evaluate(App& app, const EvaluateArgs& a) {
  auto file = cwsd::parse_predictions_csv(cwsd::read_file(a.predictions), a.predictions);
  std::vector<int> gold = file.gold;
  if (!a.gold.empty()) {
    gold.clear();
    auto text = cwsd::read_file(a.gold);
    std::size_t lineno = 0;
    for (const auto& line : cwsd::split_string(text, '\n')) {
      ++lineno;
      if (line.empty()) continue;
      try {
        gold.push_back(std::stoi(line));
      } catch (const std::logic_error&) {
        throw cwsd::FormatError(a.gold + ":" + std::to_string(lineno) + ": malformed gold label");
      }
    }
  }
  if (gold.size() != file.predictions.size())
    throw cwsd::Error("evaluate: " + std::to_string(file.predictions.size()) + " predictions vs " +
                      std::to_string(gold.size()) + " gold labels");

  std::optional<cwsd::FrequencyRoles> roles;
  int k = 0;
  if (!a.word.empty()) {
    auto ds = app.load(a.word);
    k = ds.polysemy();
    roles = cwsd::frequency_roles(ds);
  }
  if (a.k) k = *a.k;
  if (k == 0) {
    for (std::size_t i = 0; i < gold.size(); ++i) k = std::max({k, gold[i] + 1, file.predictions[i].predicted + 1});
  }
  if (a.mfs || a.lfs) {
    if (!(a.mfs && a.lfs)) throw cwsd::Error("--mfs and --lfs go together");
    roles = cwsd::FrequencyRoles{*a.mfs, *a.lfs};
  }
  std::vector<int> pred;
  for (const auto& p : file.predictions) pred.push_back(p.predicted);
  auto cm = cwsd::confusion(gold, pred, k);
  auto m = cwsd::metrics(cm, roles);
  std::vector<cwsd::ConfusionMatrix> runs{cm};
  auto bias = cwsd::sense_bias(runs);

  json config = app.config_json();
  config["command"] = "evaluate";
  config["predictions"] = a.predictions;
  config["gold"] = a.gold;
  config["word"] = a.word;
  config["k"] = k;
  const std::string digest = cwsd::hex64(cwsd::fnv1a64(config.dump()));
  json report = cwsd::report_json(a.word.empty() ? "" : a.word, digest, m, cm, bias);
  report["config"] = config;
  if (auto ts = app.timestamp()) report["generated_at"] = *ts;
  emit(a.out, report.dump(2) + "\n");
  if (!a.csv_out.empty())
    emit(a.csv_out, cwsd::metrics_csv_header() + cwsd::metrics_csv_row(a.word, m, bias));
}

struct BiasArgs {
  std::vector<std::string> reports;
  std::string out;
};

void cmd_bias(App&, const BiasArgs& a) {
  std::vector<cwsd::ConfusionMatrix> cms;
  for (const auto& path : a.reports) {
    json j;
    try {
      j = json::parse(cwsd::read_file(path));
    } catch (const json::exception& e) {
      throw cwsd::FormatError(path + ": " + e.what());
    }
    cms.push_back(cwsd::confusion_from_report(j, path));
  }
  auto rep = cwsd::sense_bias(cms);
  json out = {{"per_sense", rep.per_sense}, {"bias", rep.bias}, {"runs_aggregated", rep.runs_aggregated}};
  emit(a.out, out.dump(2) + "\n");
}

// --- experiment / layer-sweep ---------------------------------------------------------

struct ExperimentArgs {
  std::string spec, out_root = "reports";
};

std::map<std::string, cwsd::EmbeddingStore> load_stores(App& app, const std::vector<cwsd::WordDataset>& datasets,
                                                        cwsd::Split eval) {
  std::map<std::string, cwsd::EmbeddingStore> stores;
  for (const auto& ds : datasets) stores.emplace(ds.word, app.load_store(ds, {cwsd::Split::train, eval}));
  return stores;
}

void cmd_experiment(App& app, const ExperimentArgs& a) {
  json j;
  try {
    j = json::parse(cwsd::read_file(a.spec));
  } catch (const json::exception& e) {
    throw cwsd::FormatError(a.spec + ": " + e.what());
  }
  auto spec = cwsd::ExperimentSpec::from_json(j);
  std::vector<cwsd::WordDataset> datasets;
  for (const auto& w : app.resolve_words(spec.words)) datasets.push_back(app.load(w));
  std::map<std::string, cwsd::EmbeddingStore> stores;
  if (spec.classifier.kind == cwsd::ClassifierKind::knn) stores = load_stores(app, datasets, spec.eval_split);
  cwsd::EmbeddingLookup lookup = [&](const std::string& w) -> const cwsd::EmbeddingStore& { return stores.at(w); };
  auto results = cwsd::run_experiment(spec, datasets, lookup, app.cfg().threads);
  fs::path dir = fs::path(a.out_root) / spec.name;
  cwsd::write_experiment_reports(dir, spec, results, {app.timestamp()});
  for (const auto& r : results)
    spdlog::info("{} [{}]: micro {} macro {}", spec.name, r.sampler.label(), cwsd::percent(r.mean_micro_f1),
                 cwsd::percent(r.mean_macro_f1));
  spdlog::info("reports in {}", dir.string());
}

struct LayerSweepArgs {
  std::string words, layers, split = "test", out;
};

void cmd_layer_sweep(App& app, const LayerSweepArgs& a) {
  auto split = cwsd::parse_split(a.split);
  std::vector<cwsd::WordDataset> datasets;
  for (const auto& w : app.resolve_words(split_list(a.words))) datasets.push_back(app.load(w));
  auto stores = load_stores(app, datasets, split);
  std::vector<int> layers = parse_layers(a.layers);
  if (layers.empty()) {
    if (stores.empty()) throw cwsd::Error("layer-sweep: no words");
    layers = stores.begin()->second.layers();
  }
  cwsd::EmbeddingLookup lookup = [&](const std::string& w) -> const cwsd::EmbeddingStore& { return stores.at(w); };
  emit(a.out, cwsd::layer_sweep_csv(cwsd::layer_sweep(datasets, lookup, layers, split, app.cfg().threads)));
}

// --- dataset-build ---------------------------------------------------------------------

struct DatasetBuildArgs {
  std::string input, word, sense_map, out_dir;
  cwsd::BuildOptions opts;
};

void cmd_dataset_build(App& app, const DatasetBuildArgs& a) {
  std::ifstream in(a.input);
  if (!in) throw cwsd::Error("cannot open " + a.input);
  auto sentences = cwsd::parse_annotated_jsonl(in, a.input);
  std::map<std::string, std::string> sense_map;
  try {
    sense_map = json::parse(cwsd::read_file(a.sense_map)).get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw cwsd::FormatError(a.sense_map + ": expected a JSON object of link title -> sense id: " + e.what());
  }
  auto res = cwsd::build_dataset(sentences, a.word, sense_map, a.opts);
  fs::path root = a.out_dir.empty() ? app.data_root() : fs::path(a.out_dir);
  cwsd::write_word_dataset(res.dataset, root);
  cwsd::write_file_atomic(root / a.word / "build_report.json", res.report.dump(2) + "\n");
  for (const auto& d : res.report["dropped_senses"])
    spdlog::warn("{}: dropped sense '{}' with {} occurrences", a.word, d["sense_id"].get<std::string>(),
                 d["count"].get<std::size_t>());
  spdlog::info("{}: {} train / {} test instances in {}", a.word, res.dataset.train.size(), res.dataset.test.size(),
               (root / a.word).string());
}

}  // namespace

int main(int argc, char** argv) {
  GlobalConfig defaults;
  try {
    defaults = load_config_defaults();
  } catch (const cwsd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  App app(defaults);
  auto& cfg = app.cfg();

  CLI::App cli{"Coarse-grained word sense disambiguation toolkit"};
  cli.require_subcommand(1);
  cli.add_option("--data-root", cfg.data_root, "Dataset root (one directory per word)");
  cli.add_option("--cache-dir", cfg.cache_dir, "Embedding cache directory");
  cli.add_option("--provider-url", cfg.provider_url, "Embedding provider base URL");
  cli.add_option("--pooling", cfg.pooling, "Default layer pooling, e.g. sum:last4, single:8");
  cli.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
  cli.add_option("--log-level", cfg.log_level, "trace|debug|info|warn|error|off");
  cli.add_flag("--no-timestamp", cfg.no_timestamp, "Omit generated_at from reports");

  std::function<void()> action;

  StatsArgs stats;
  auto* s = cli.add_subcommand("stats", "Per-word statistics CSV");
  s->add_option("--words", stats.words, "Comma-separated words (default: all)");
  s->add_option("-o,--out", stats.out, "Output file (default: stdout)");
  s->callback([&] { action = [&] { cmd_stats(app, stats); }; });

  IngestArgs ingest;
  s = cli.add_subcommand("ingest", "Fetch target-token embeddings from the provider into the cache");
  s->add_option("--words", ingest.words, "Comma-separated words (default: all)");
  s->add_option("--splits", ingest.splits, "Comma-separated splits");
  s->add_option("--layers", ingest.layers, "'all' or comma-separated layer indices");
  s->add_option("--batch-size", ingest.batch_size)->check(CLI::PositiveNumber);
  s->add_option("--retries", ingest.retries)->check(CLI::NonNegativeNumber);
  s->callback([&] { action = [&] { cmd_ingest(app, ingest); }; });

  SenseArgs senses;
  s = cli.add_subcommand("build-senses", "Build and save a word's sense centroids");
  s->add_option("--word", senses.word)->required();
  s->add_option("--pooling", senses.pooling, "Layer pooling (default: global --pooling)");
  s->add_option("--sampler", senses.sampler, "full | balanced | nshot:N | fraction:P");
  s->add_option("--seed", senses.seed);
  s->add_option("-o,--out", senses.out, "Output prefix (default: <cache-dir>/senses/<word>)");
  s->callback([&] { action = [&] { cmd_build_senses(app, senses); }; });

  ClassifyArgs classify;
  s = cli.add_subcommand("classify", "1NN predictions for a split");
  s->add_option("--word", classify.word)->required();
  s->add_option("--split", classify.split);
  s->add_option("--pooling", classify.pooling);
  s->add_option("--threshold", classify.threshold, "Abstain (fall back to MFS) below this cosine");
  s->add_option("--sampler", classify.sampler);
  s->add_option("--seed", classify.seed);
  s->add_option("--senses", classify.senses, "Prefix of a saved sense table");
  s->add_option("-o,--out", classify.out, "Predictions CSV (default: stdout)");
  s->add_option("--sweep-out", classify.sweep_out, "Threshold sweep CSV");
  s->add_option("--similarities-out", classify.similarities_out, "Per-instance similarity CSV");
  s->callback([&] { action = [&] { cmd_classify(app, classify); }; });

  EvaluateArgs evaluate;
  s = cli.add_subcommand("evaluate", "Metrics report for a predictions CSV");
  s->add_option("--predictions", evaluate.predictions)->required();
  s->add_option("--gold", evaluate.gold, "Gold labels file (default: the CSV's gold column)");
  s->add_option("--word", evaluate.word, "Word whose dataset gives k and the MFS/LFS classes");
  s->add_option("--k", evaluate.k, "Number of classes");
  s->add_option("--mfs", evaluate.mfs, "MFS class index");
  s->add_option("--lfs", evaluate.lfs, "LFS class index");
  s->add_option("-o,--out", evaluate.out, "Report JSON (default: stdout)");
  s->add_option("--csv-out", evaluate.csv_out, "Flat CSV row");
  s->callback([&] { action = [&] { cmd_evaluate(app, evaluate); }; });

  BiasArgs bias;
  s = cli.add_subcommand("bias", "Median-of-runs sense bias from run reports");
  s->add_option("reports", bias.reports, "Report JSON files, one per run")->required();
  s->add_option("-o,--out", bias.out);
  s->callback([&] { action = [&] { cmd_bias(app, bias); }; });

  ExperimentArgs experiment;
  s = cli.add_subcommand("experiment", "Run an experiment spec");
  s->add_option("spec", experiment.spec, "Experiment JSON")->required();
  s->add_option("--out-root", experiment.out_root, "Reports root (default: reports)");
  s->callback([&] { action = [&] { cmd_experiment(app, experiment); }; });

  LayerSweepArgs sweep;
  s = cli.add_subcommand("layer-sweep", "Per-layer 1NN F1 curve");
  s->add_option("--words", sweep.words);
  s->add_option("--layers", sweep.layers, "Comma-separated layers (default: every cached layer)");
  s->add_option("--split", sweep.split);
  s->add_option("-o,--out", sweep.out);
  s->callback([&] { action = [&] { cmd_layer_sweep(app, sweep); }; });

  DatasetBuildArgs build;
  s = cli.add_subcommand("dataset-build", "Build a word dataset from hyperlink-annotated JSONL");
  s->add_option("--input", build.input)->required();
  s->add_option("--word", build.word)->required();
  s->add_option("--sense-map", build.sense_map, "JSON object: link title -> sense id")->required();
  s->add_option("--ratio", build.opts.ratio, "Train share per sense");
  s->add_option("--seed", build.opts.seed);
  s->add_option("--min-occurrences", build.opts.min_occurrences);
  s->add_option("--min-tokens", build.opts.min_tokens);
  s->add_option("-o,--out-dir", build.out_dir, "Output data root (default: --data-root)");
  s->callback([&] { action = [&] { cmd_dataset_build(app, build); }; });

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << cli.help();
    return 2;
  }

  try {
    app.setup();
    action();
  } catch (const cwsd::Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const spdlog::spdlog_ex& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
