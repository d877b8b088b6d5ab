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

// Supervised linear baseline: multinomial logistic regression over averaged
// static token vectors.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwsd/common.hpp"
#include "cwsd/corpus.hpp"

namespace cwsd {

enum class FeatureMode { target_token, sentence_mean };
enum class VectorSourceKind { random_init_lookup, external_table };

inline const char* feature_mode_name(FeatureMode m) {
  return m == FeatureMode::target_token ? "target_token" : "sentence_mean";
}
inline FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "target_token") return FeatureMode::target_token;
  if (s == "sentence_mean") return FeatureMode::sentence_mean;
  throw Error(detail::cat("unknown feature mode '", s, "'"));
}
inline const char* vector_source_name(VectorSourceKind k) {
  return k == VectorSourceKind::random_init_lookup ? "random_init_lookup" : "external_table";
}

// Static token vectors; unknown tokens map to the zero vector.
class TokenVectors {
 public:
  TokenVectors(VectorSourceKind kind, std::size_t dim) : kind_(kind), dim_(dim) {
    if (dim == 0) throw Error("token vectors need dim >= 1");
  }

  // Seeded uniform(-0.5/d, 0.5/d) vectors for every token of `vocab`,
  // drawn in sorted token order.
  static TokenVectors random_init(const std::set<std::string>& vocab, std::size_t dim, std::uint64_t seed) {
    TokenVectors tv(VectorSourceKind::random_init_lookup, dim);
    Rng rng(seed);
    const double r = 0.5 / static_cast<double>(dim);
    for (const auto& tok : vocab) {
      std::vector<double> v(dim);
      for (auto& x : v) x = rng.uniform(-r, r);
      tv.table_.emplace(tok, std::move(v));
    }
    return tv;
  }

  static TokenVectors random_init(const WordDataset& ds, std::size_t dim, std::uint64_t seed) {
    std::set<std::string> vocab;
    for (const auto& inst : ds.train) vocab.insert(inst.tokens.begin(), inst.tokens.end());
    return random_init(vocab, dim, seed);
  }

  // Text table: first line "count dim", then "token v1 ... vd" per line.
  static TokenVectors load_text(std::istream& in, const std::string& context = "vectors") {
    std::size_t count = 0, dim = 0;
    std::string header;
    if (!std::getline(in, header)) throw FormatError(context + ":1: missing header");
    std::istringstream hs(header);
    if (!(hs >> count >> dim) || dim == 0) throw FormatError(context + ":1: expected 'count dim'");
    TokenVectors tv(VectorSourceKind::external_table, dim);
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string tok;
      ls >> tok;
      std::vector<double> v(dim);
      for (auto& x : v) {
        if (!(ls >> x)) throw FormatError(detail::cat(context, ':', lineno, ": expected ", dim, " values"));
      }
      std::string extra;
      if (ls >> extra) throw FormatError(detail::cat(context, ':', lineno, ": more than ", dim, " values"));
      tv.table_[tok] = std::move(v);
    }
    if (tv.table_.size() != count)
      throw FormatError(detail::cat(context, ": header declares ", count, " vectors, found ", tv.table_.size()));
    return tv;
  }

  static TokenVectors load_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(detail::cat("cannot open ", path.string()));
    return load_text(in, path.string());
  }

  void set(const std::string& token, std::vector<double> v) {
    if (v.size() != dim_) throw Error("token vector dimension mismatch");
    table_[token] = std::move(v);
  }

  const std::vector<double>* find(const std::string& token) const {
    auto it = table_.find(token);
    return it == table_.end() ? nullptr : &it->second;
  }

  std::size_t dim() const { return dim_; }
  VectorSourceKind kind() const { return kind_; }

 private:
  VectorSourceKind kind_;
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

// Feature vector of an instance. `unknown` (if given) is incremented once
// per token missing from the table.
inline std::vector<double> featurize(const Instance& inst, const TokenVectors& source, FeatureMode mode,
                                     std::size_t* unknown = nullptr) {
  if (inst.tokens.empty()) throw Error(detail::cat("featurize: empty sentence '", inst.instance_id, "'"));
  std::vector<double> out(source.dim(), 0.0);
  auto add = [&](const std::string& tok) {
    if (const auto* v = source.find(tok)) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*v)[i];
    } else if (unknown) {
      ++*unknown;
    }
  };
  if (mode == FeatureMode::target_token) {
    add(inst.target());
  } else {
    for (const auto& tok : inst.tokens) add(tok);
    for (auto& x : out) x /= static_cast<double>(inst.tokens.size());
  }
  return out;
}

struct LinearHyper {
  double lr = 0.1;
  int epochs = 25;
  double l2 = 1e-4;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
};

struct LinearModel {
  int k = 0;
  std::size_t dim = 0;
  // k x dim, row-major.
  std::vector<double> weights;
  std::vector<double> bias;
  FeatureMode feature_mode = FeatureMode::sentence_mean;
  VectorSourceKind vector_source = VectorSourceKind::random_init_lookup;

  LinearModel() = default;
  LinearModel(int classes, std::size_t d)
      : k(classes), dim(d), weights(static_cast<std::size_t>(classes) * d, 0.0), bias(static_cast<std::size_t>(classes), 0.0) {
    if (classes < 2) throw Error("linear model needs k >= 2");
  }

  double& w(int c, std::size_t i) { return weights[static_cast<std::size_t>(c) * dim + i]; }
  double w(int c, std::size_t i) const { return weights[static_cast<std::size_t>(c) * dim + i]; }

  std::vector<double> logits(std::span<const double> x) const {
    if (x.size() != dim) throw Error(detail::cat("linear model: feature dim ", x.size(), ", expected ", dim));
    std::vector<double> z(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
      double s = bias[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < dim; ++i) s += w(c, i) * x[i];
      z[static_cast<std::size_t>(c)] = s;
    }
    return z;
  }

  bool operator==(const LinearModel&) const = default;
};

inline std::vector<double> softmax(std::span<const double> z) {
  double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += p[i] = std::exp(z[i] - m);
  for (auto& x : p) x /= s;
  return p;
}

struct LinearPrediction {
  int predicted = 0;
  std::vector<double> probabilities;
};

inline LinearPrediction predict_features(const LinearModel& model, std::span<const double> x) {
  LinearPrediction p;
  p.probabilities = softmax(model.logits(x));
  p.predicted = static_cast<int>(std::max_element(p.probabilities.begin(), p.probabilities.end()) -
                                 p.probabilities.begin());
  return p;
}

inline LinearPrediction predict_linear(const LinearModel& model, const Instance& inst, const TokenVectors& source) {
  if (source.dim() != model.dim)
    throw Error(detail::cat("predict_linear: vector dim ", source.dim(), ", model dim ", model.dim));
  return predict_features(model, featurize(inst, source, model.feature_mode));
}

struct LossGradient {
  double loss = 0.0;
  std::vector<double> d_weights;
  std::vector<double> d_bias;
};

// Mean softmax cross-entropy over the rows plus (l2/2)||W||^2, with its
// gradient. `rows` index into `x`/`y`.
inline LossGradient loss_and_gradient(const LinearModel& m, std::span<const std::vector<double>> x,
                                      std::span<const int> y, double l2, std::span<const std::size_t> rows) {
  LossGradient g;
  g.d_weights.assign(m.weights.size(), 0.0);
  g.d_bias.assign(m.bias.size(), 0.0);
  if (rows.empty()) return g;
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    const auto& xi = x[r];
    auto z = m.logits(xi);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    const double log_sum = zmax + std::log(sum);
    g.loss += (log_sum - z[static_cast<std::size_t>(y[r])]) * inv_n;
    for (int c = 0; c < m.k; ++c) {
      double delta = std::exp(z[static_cast<std::size_t>(c)] - log_sum) - (c == y[r] ? 1.0 : 0.0);
      delta *= inv_n;
      g.d_bias[static_cast<std::size_t>(c)] += delta;
      double* row = &g.d_weights[static_cast<std::size_t>(c) * m.dim];
      for (std::size_t i = 0; i < m.dim; ++i) row[i] += delta * xi[i];
    }
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    sq += m.weights[i] * m.weights[i];
    g.d_weights[i] += l2 * m.weights[i];
  }
  g.loss += 0.5 * l2 * sq;
  return g;
}

inline LossGradient loss_and_gradient(const LinearModel& m, std::span<const std::vector<double>> x,
                                      std::span<const int> y, double l2) {
  std::vector<std::size_t> all(x.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return loss_and_gradient(m, x, y, l2, all);
}

struct TrainingTrace {
  // Full-data objective after each epoch.
  std::vector<double> epoch_loss;
};

// Mini-batch gradient descent from zero initialization. The shuffle
// schedule is drawn from `hyper.seed`, so training is deterministic.
inline LinearModel train_features(std::span<const std::vector<double>> x, std::span<const int> y, int k,
                                  const LinearHyper& hyper, TrainingTrace* trace = nullptr) {
  if (x.empty()) throw Error("train_linear: empty training set");
  if (x.size() != y.size()) throw Error("train_linear: features and labels differ in length");
  if (hyper.batch == 0) throw Error("train_linear: batch size must be positive");
  LinearModel m(k, x.front().size());
  for (int label : y) {
    if (label < 0 || label >= k) throw Error(detail::cat("train_linear: label ", label, " outside k=", k));
  }
  Rng rng(hyper.seed);
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0, b = 0; start < order.size(); start += hyper.batch, ++b) {
      std::span<const std::size_t> rows(order.data() + start, std::min(hyper.batch, order.size() - start));
      auto g = loss_and_gradient(m, x, y, hyper.l2, rows);
      if (!std::isfinite(g.loss))
        throw Error(detail::cat("train_linear: non-finite loss at epoch ", epoch, " batch ", b));
      for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights[i] -= hyper.lr * g.d_weights[i];
      for (std::size_t i = 0; i < m.bias.size(); ++i) m.bias[i] -= hyper.lr * g.d_bias[i];
    }
    if (trace) trace->epoch_loss.push_back(loss_and_gradient(m, x, y, hyper.l2).loss);
  }
  return m;
}

inline LinearModel train_linear(const WordDataset& ds, const TokenVectors& source, FeatureMode mode,
                                const LinearHyper& hyper, TrainingTrace* trace = nullptr,
                                const std::vector<const Instance*>* selection = nullptr) {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  auto add = [&](const Instance& inst) {
    x.push_back(featurize(inst, source, mode));
    y.push_back(inst.gold);
  };
  if (selection) {
    for (const Instance* inst : *selection) add(*inst);
  } else {
    for (const auto& inst : ds.train) add(inst);
  }
  if (x.empty()) throw Error(detail::cat(ds.word, ": empty training set"));
  LinearModel m = train_features(x, y, ds.polysemy(), hyper, trace);
  m.feature_mode = mode;
  m.vector_source = source.kind();
  return m;
}

inline nlohmann::json linear_model_json(const LinearModel& m) {
  return {{"k", m.k},
          {"dim", m.dim},
          {"feature_mode", feature_mode_name(m.feature_mode)},
          {"vector_source", vector_source_name(m.vector_source)},
          {"weights", m.weights},
          {"bias", m.bias}};
}

inline LinearModel linear_model_from_json(const nlohmann::json& j) {
  try {
    LinearModel m(j.at("k").get<int>(), j.at("dim").get<std::size_t>());
    m.feature_mode = parse_feature_mode(j.at("feature_mode").get<std::string>());
    const auto src = j.at("vector_source").get<std::string>();
    if (src == "random_init_lookup") m.vector_source = VectorSourceKind::random_init_lookup;
    else if (src == "external_table") m.vector_source = VectorSourceKind::external_table;
    else throw Error(detail::cat("unknown vector source '", src, "'"));
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    if (m.weights.size() != static_cast<std::size_t>(m.k) * m.dim || m.bias.size() != static_cast<std::size_t>(m.k))
      throw Error("linear model JSON: parameter sizes do not match k and dim");
    for (double v : m.weights)
      if (!std::isfinite(v)) throw Error("linear model JSON: non-finite weight");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(detail::cat("linear model JSON: ", e.what()));
  }
}

}  // namespace cwsd
