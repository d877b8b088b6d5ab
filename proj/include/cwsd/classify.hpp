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

// Nearest-centroid (1NN) sense classification with MFS fallback.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwsd/common.hpp"
#include "cwsd/corpus.hpp"
#include "cwsd/embedding.hpp"
#include "cwsd/sensemodel.hpp"

namespace cwsd {

enum class Decision { nearest_neighbor, mfs_fallback, below_threshold_abstain };

inline const char* decision_name(Decision d) {
  switch (d) {
    case Decision::nearest_neighbor: return "nearest_neighbor";
    case Decision::mfs_fallback: return "mfs_fallback";
    case Decision::below_threshold_abstain: return "below_threshold_abstain";
  }
  return "?";
}

inline Decision parse_decision(std::string_view s) {
  if (s == "nearest_neighbor") return Decision::nearest_neighbor;
  if (s == "mfs_fallback") return Decision::mfs_fallback;
  if (s == "below_threshold_abstain") return Decision::below_threshold_abstain;
  throw Error(detail::cat("unknown decision '", s, "'"));
}

struct Prediction {
  std::string instance_id;
  int predicted = 0;
  // Max cosine over centroids; 0 for mfs_fallback.
  double similarity = 0.0;
  Decision decided_by = Decision::nearest_neighbor;

  bool operator==(const Prediction&) const = default;
};

inline double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size())
    throw Error(detail::cat("cosine: dimension mismatch ", u.size(), " vs ", v.size()));
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * v[i];
    uu += static_cast<double>(u[i]) * u[i];
    vv += static_cast<double>(v[i]) * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error("cosine: zero vector");
  double c = dot / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

// Argmax cosine over the centroids present in the table; ties go to the
// lowest class index. With a threshold, a best match below it abstains and
// resolves to the MFS label.
inline Prediction classify_instance(std::span<const float> query, const SenseTable& table,
                                    std::optional<double> threshold = std::nullopt) {
  Prediction p;
  if (table.centroids.empty()) {
    p.predicted = table.mfs;
    p.decided_by = Decision::mfs_fallback;
    return p;
  }
  bool first = true;
  for (const auto& [c, centroid] : table.centroids) {
    if (centroid.size() != query.size())
      throw Error(detail::cat(table.word, ": query dim ", query.size(), " vs centroid dim ", centroid.size()));
    double s = cosine(query, centroid);
    if (first || s > p.similarity) {
      p.predicted = c;
      p.similarity = s;
      first = false;
    }
  }
  if (threshold && p.similarity < *threshold) {
    p.predicted = table.mfs;
    p.decided_by = Decision::below_threshold_abstain;
  }
  return p;
}

inline std::vector<Prediction> classify_split(const WordDataset& ds, const EmbeddingStore& store,
                                              const SenseTable& table, Split split,
                                              std::optional<double> threshold = std::nullopt) {
  std::vector<Prediction> out;
  const auto& insts = ds.instances(split);
  out.reserve(insts.size());
  for (const auto& inst : insts) {
    const auto* e = store.find(inst.instance_id);
    if (!e) throw Error(detail::cat(ds.word, ": missing embedding for instance '", inst.instance_id, "'"));
    Prediction p = classify_instance(pool(*e, table.pooling), table, threshold);
    p.instance_id = inst.instance_id;
    out.push_back(std::move(p));
  }
  return out;
}

// --- Similarity analysis ------------------------------------------------------

struct SimilarityRow {
  std::string instance_id;
  double similarity = 0.0;
  bool correct = false;
  Decision decided_by = Decision::nearest_neighbor;
};

struct SweepRow {
  double threshold = 0.0;
  // Fraction of all predictions decided by nearest neighbor at or above
  // the threshold.
  double coverage = 0.0;
  // Accuracy over those; absent when coverage is zero.
  std::optional<double> precision;
};

struct SimilarityReport {
  std::vector<SimilarityRow> rows;
  std::vector<SweepRow> sweep;
};

// Thresholds 0, step, 2*step, ... up to 1 inclusive.
inline SimilarityReport similarity_report(std::span<const Prediction> preds, std::span<const int> gold,
                                          int steps = 20) {
  if (preds.size() != gold.size())
    throw Error(detail::cat("similarity_report: ", preds.size(), " predictions vs ", gold.size(), " gold labels"));
  SimilarityReport rep;
  for (std::size_t i = 0; i < preds.size(); ++i)
    rep.rows.push_back({preds[i].instance_id, preds[i].similarity, preds[i].predicted == gold[i], preds[i].decided_by});
  for (int s = 0; s <= steps; ++s) {
    SweepRow row;
    row.threshold = static_cast<double>(s) / steps;
    std::size_t kept = 0, correct = 0;
    for (const auto& r : rep.rows) {
      if (r.decided_by != Decision::nearest_neighbor || r.similarity < row.threshold) continue;
      ++kept;
      correct += r.correct ? 1 : 0;
    }
    row.coverage = rep.rows.empty() ? 0.0 : static_cast<double>(kept) / static_cast<double>(rep.rows.size());
    if (kept > 0) row.precision = static_cast<double>(correct) / static_cast<double>(kept);
    rep.sweep.push_back(row);
  }
  return rep;
}

inline std::string predictions_csv(std::span<const Prediction> preds, std::span<const int> gold) {
  if (preds.size() != gold.size()) throw Error("predictions_csv: length mismatch");
  std::string out = "instance_id,gold,predicted,similarity,decided_by\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out += detail::cat(preds[i].instance_id, ',', gold[i], ',', preds[i].predicted, ',',
                       format_real(preds[i].similarity), ',', decision_name(preds[i].decided_by), '\n');
  }
  return out;
}

struct PredictionsFile {
  std::vector<Prediction> predictions;
  std::vector<int> gold;
};

inline PredictionsFile parse_predictions_csv(std::string_view text, const std::string& context = "predictions") {
  PredictionsFile f;
  auto lines = split_string(text, '\n');
  if (lines.empty() || lines.front() != "instance_id,gold,predicted,similarity,decided_by")
    throw FormatError(context + ":1: unexpected header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cols = split_string(lines[i], ',');
    if (cols.size() != 5) throw FormatError(detail::cat(context, ':', i + 1, ": expected 5 columns"));
    try {
      Prediction p;
      p.instance_id = cols[0];
      p.predicted = std::stoi(cols[2]);
      p.similarity = cols[3].empty() ? 0.0 : std::stod(cols[3]);
      p.decided_by = parse_decision(cols[4]);
      f.gold.push_back(std::stoi(cols[1]));
      f.predictions.push_back(std::move(p));
    } catch (const std::logic_error&) {
      throw FormatError(detail::cat(context, ':', i + 1, ": malformed row"));
    }
  }
  return f;
}

inline std::string similarities_csv(const SimilarityReport& rep) {
  std::string out = "instance_id,similarity,correct,decided_by\n";
  for (const auto& r : rep.rows)
    out += detail::cat(r.instance_id, ',', format_real(r.similarity), ',', r.correct ? 1 : 0, ',',
                       decision_name(r.decided_by), '\n');
  return out;
}

inline std::string sweep_csv(const SimilarityReport& rep) {
  std::string out = "threshold,coverage,precision\n";
  for (const auto& r : rep.sweep)
    out += detail::cat(format_fixed(r.threshold, 2), ',', format_real(r.coverage), ',',
                       r.precision ? format_real(*r.precision) : std::string(), '\n');
  return out;
}

}  // namespace cwsd
