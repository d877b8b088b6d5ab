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

// Confusion matrices, per-class precision/recall/F1 with micro and macro
// averages, grouped reports and the sense-bias metric.
//
// Conventions:
//  * P, R and F of a class are 0 whenever their denominator is 0.
//  * Macro F1 averages over all k classes, zero-support classes included.
//  * Micro F1 pools TP/FP/FN over classes; for single-label data it equals
//    accuracy.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwsd/common.hpp"
#include "cwsd/corpus.hpp"

namespace cwsd {

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int k) : k_(k), cells_(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0) {
    if (k < 1) throw Error("confusion matrix needs k >= 1");
  }

  int k() const { return k_; }

  // Instances with gold `gold` predicted as `pred`.
  long long& at(int gold, int pred) { return cells_[index(gold, pred)]; }
  long long at(int gold, int pred) const { return cells_[index(gold, pred)]; }

  long long row_sum(int i) const {
    long long s = 0;
    for (int j = 0; j < k_; ++j) s += at(i, j);
    return s;
  }
  long long col_sum(int j) const {
    long long s = 0;
    for (int i = 0; i < k_; ++i) s += at(i, j);
    return s;
  }
  long long total() const {
    long long s = 0;
    for (auto c : cells_) s += c;
    return s;
  }
  long long trace() const {
    long long s = 0;
    for (int i = 0; i < k_; ++i) s += at(i, i);
    return s;
  }

  long long tp(int i) const { return at(i, i); }
  long long fp(int i) const { return col_sum(i) - at(i, i); }
  long long fn(int i) const { return row_sum(i) - at(i, i); }

  std::vector<std::vector<long long>> rows() const {
    std::vector<std::vector<long long>> out(static_cast<std::size_t>(k_));
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j) out[static_cast<std::size_t>(i)].push_back(at(i, j));
    return out;
  }

  static ConfusionMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
    ConfusionMatrix cm(static_cast<int>(rows.size()));
    for (int i = 0; i < cm.k(); ++i) {
      if (rows[static_cast<std::size_t>(i)].size() != rows.size())
        throw Error("confusion matrix rows must be square");
      for (int j = 0; j < cm.k(); ++j) {
        long long v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (v < 0) throw Error("confusion matrix cells must be nonnegative");
        cm.at(i, j) = v;
      }
    }
    return cm;
  }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= k_ || j >= k_)
      throw Error(detail::cat("confusion index (", i, ",", j, ") outside k=", k_));
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(j);
  }

  int k_ = 0;
  std::vector<long long> cells_;
};

inline ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> pred, int k) {
  if (gold.size() != pred.size())
    throw Error(detail::cat("confusion: ", gold.size(), " gold labels vs ", pred.size(), " predictions"));
  ConfusionMatrix cm(k);
  for (std::size_t n = 0; n < gold.size(); ++n) {
    if (gold[n] < 0 || gold[n] >= k || pred[n] < 0 || pred[n] >= k)
      throw Error(detail::cat("confusion: label out of range at position ", n, " (k=", k, ")"));
    ++cm.at(gold[n], pred[n]);
  }
  return cm;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long support = 0;
};

// Train-frequency roles of two classes, used for the MFS/LFS breakdown.
struct FrequencyRoles {
  int mfs = 0;
  int lfs = 0;
};

inline FrequencyRoles frequency_roles(const WordDataset& ds) { return {ds.mfs(), ds.lfs()}; }

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  // Support-weighted mean of per-class F1.
  double weighted_f1 = 0.0;
  std::optional<double> mfs_f1;
  std::optional<double> lfs_f1;
  double accuracy = 0.0;
};

inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline MetricsReport metrics(const ConfusionMatrix& cm, std::optional<FrequencyRoles> roles = std::nullopt) {
  const long long total = cm.total();
  if (total <= 0) throw Error("metrics: empty confusion matrix");
  MetricsReport rep;
  long long tp_sum = 0, fp_sum = 0, fn_sum = 0;
  for (int i = 0; i < cm.k(); ++i) {
    ClassMetrics m;
    const double tp = static_cast<double>(cm.tp(i));
    m.precision = safe_ratio(tp, tp + static_cast<double>(cm.fp(i)));
    m.recall = safe_ratio(tp, tp + static_cast<double>(cm.fn(i)));
    m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.support = cm.row_sum(i);
    tp_sum += cm.tp(i);
    fp_sum += cm.fp(i);
    fn_sum += cm.fn(i);
    rep.macro_f1 += m.f1;
    rep.weighted_f1 += m.f1 * static_cast<double>(m.support);
    rep.per_class.push_back(m);
  }
  rep.macro_f1 /= cm.k();
  rep.weighted_f1 /= static_cast<double>(total);
  const double micro_p = safe_ratio(static_cast<double>(tp_sum), static_cast<double>(tp_sum + fp_sum));
  const double micro_r = safe_ratio(static_cast<double>(tp_sum), static_cast<double>(tp_sum + fn_sum));
  rep.micro_f1 = safe_ratio(2.0 * micro_p * micro_r, micro_p + micro_r);
  rep.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  if (roles) {
    rep.mfs_f1 = rep.per_class.at(static_cast<std::size_t>(roles->mfs)).f1;
    rep.lfs_f1 = rep.per_class.at(static_cast<std::size_t>(roles->lfs)).f1;
  }
  return rep;
}

// Percent with one decimal, round-half-up, e.g. 0.51592 -> "51.6".
inline std::string percent(double fraction) { return format_fixed(100.0 * fraction, 1); }

inline constexpr const char* kUngrouped = "ungrouped";

// Independent metrics per group tag; untagged instances fall into
// "ungrouped".
inline std::map<std::string, MetricsReport> grouped_metrics(std::span<const Instance> instances,
                                                            std::span<const int> predicted, int k,
                                                            std::optional<FrequencyRoles> roles = std::nullopt) {
  if (instances.size() != predicted.size())
    throw Error(detail::cat("grouped_metrics: ", instances.size(), " instances vs ", predicted.size(), " predictions"));
  std::map<std::string, ConfusionMatrix> cms;
  for (std::size_t n = 0; n < instances.size(); ++n) {
    const std::string key = instances[n].group.value_or(kUngrouped);
    auto it = cms.try_emplace(key, k).first;
    const int g = instances[n].gold, p = predicted[n];
    if (g < 0 || g >= k || p < 0 || p >= k) throw Error("grouped_metrics: label out of range");
    ++it->second.at(g, p);
  }
  std::map<std::string, MetricsReport> out;
  for (const auto& [key, cm] : cms) out.emplace(key, metrics(cm, roles));
  return out;
}

struct BiasReport {
  std::vector<double> per_sense;
  double bias = 0.0;
  int runs_aggregated = 0;
};

// Per-run bias towards each sense j: sum over gold rows i != j of the
// fraction of row i predicted as j. Per-sense values are the median over
// runs; the word's bias is the maximum over senses.
inline std::vector<double> sense_bias_single(const ConfusionMatrix& cm) {
  std::vector<double> b(static_cast<std::size_t>(cm.k()), 0.0);
  for (int i = 0; i < cm.k(); ++i) {
    const long long row = cm.row_sum(i);
    if (row == 0) continue;
    for (int j = 0; j < cm.k(); ++j) {
      if (j == i) continue;
      b[static_cast<std::size_t>(j)] += static_cast<double>(cm.at(i, j)) / static_cast<double>(row);
    }
  }
  return b;
}

inline BiasReport sense_bias(std::span<const ConfusionMatrix> runs) {
  if (runs.empty()) throw Error("sense_bias: no runs");
  const int k = runs.front().k();
  std::vector<std::vector<double>> per_run;
  for (const auto& cm : runs) {
    if (cm.k() != k) throw Error(detail::cat("sense_bias: inconsistent class counts ", k, " vs ", cm.k()));
    per_run.push_back(sense_bias_single(cm));
  }
  BiasReport rep;
  rep.runs_aggregated = static_cast<int>(runs.size());
  for (int j = 0; j < k; ++j) {
    std::vector<double> vals;
    for (const auto& b : per_run) vals.push_back(b[static_cast<std::size_t>(j)]);
    rep.per_sense.push_back(median(std::move(vals)));
  }
  rep.bias = *std::max_element(rep.per_sense.begin(), rep.per_sense.end());
  return rep;
}

// --- Report JSON ------------------------------------------------------------------

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json report_json(const std::string& word, const std::string& config_digest, const MetricsReport& m,
                                  const ConfusionMatrix& cm, const std::optional<BiasReport>& bias) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& c : m.per_class)
    per_class.push_back({{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
  nlohmann::json j = {{"word", word},
                      {"config_digest", config_digest},
                      {"per_class", per_class},
                      {"micro_f1", m.micro_f1},
                      {"macro_f1", m.macro_f1},
                      {"mfs_f1", optional_json(m.mfs_f1)},
                      {"lfs_f1", optional_json(m.lfs_f1)},
                      {"accuracy", m.accuracy},
                      {"confusion", cm.rows()}};
  if (bias) {
    j["bias"] = {{"per_sense", bias->per_sense}, {"max", bias->bias}, {"runs_aggregated", bias->runs_aggregated}};
  } else {
    j["bias"] = nullptr;
  }
  return j;
}

inline ConfusionMatrix confusion_from_report(const nlohmann::json& j, const std::string& context = "report") {
  try {
    return ConfusionMatrix::from_rows(j.at("confusion").get<std::vector<std::vector<long long>>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(detail::cat(context, ": no usable confusion matrix: ", e.what()));
  }
}

inline std::string metrics_csv_header() { return "word,micro_f1,macro_f1,mfs_f1,lfs_f1,bias\n"; }

inline std::string metrics_csv_row(const std::string& word, const MetricsReport& m,
                                   const std::optional<BiasReport>& bias) {
  auto opt = [](const std::optional<double>& v) { return v ? percent(*v) : std::string(); };
  return detail::cat(word, ',', percent(m.micro_f1), ',', percent(m.macro_f1), ',', opt(m.mfs_f1), ',',
                     opt(m.lfs_f1), ',', bias ? format_fixed(bias->bias, 2) : std::string(), '\n');
}

}  // namespace cwsd
