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

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwsd/common.hpp"
#include "cwsd/corpus.hpp"
#include "cwsd/embedding.hpp"

namespace cwsd {

using InstanceIdSet = std::unordered_set<std::string>;

// Per-sense centroids of pooled train embeddings. Centroids are plain means
// (not length-normalized).
struct SenseTable {
  std::string word;
  PoolingSpec pooling;
  std::map<int, Vec> centroids;
  std::map<int, std::size_t> support;
  int mfs = 0;

  std::size_t dim() const { return centroids.empty() ? 0 : centroids.begin()->second.size(); }

  bool operator==(const SenseTable&) const = default;
};

// Builds the table from the train split, restricted to `subset` when given.
// Senses without selected instances get no centroid. Contributions are
// summed in instance-id order so the result does not depend on the order
// of the train list.
inline SenseTable build_sense_table(const WordDataset& ds, const EmbeddingStore& store,
                                    const PoolingSpec& pooling, const InstanceIdSet* subset = nullptr) {
  SenseTable table;
  table.word = ds.word;
  table.pooling = pooling.resolve(store.layers());

  std::vector<const Instance*> selected;
  for (const auto& inst : ds.train) {
    if (!subset || subset->count(inst.instance_id)) selected.push_back(&inst);
  }
  if (selected.empty()) throw Error(detail::cat(ds.word, ": empty training selection"));
  std::sort(selected.begin(), selected.end(),
            [](const Instance* a, const Instance* b) { return a->instance_id < b->instance_id; });

  std::map<int, std::vector<double>> sums;
  std::size_t dim = 0;
  for (const Instance* inst : selected) {
    const auto* e = store.find(inst->instance_id);
    if (!e) throw Error(detail::cat(ds.word, ": missing embedding for instance '", inst->instance_id, "'"));
    Vec v = pool(*e, table.pooling);
    if (dim == 0) dim = v.size();
    if (v.size() != dim)
      throw Error(detail::cat(ds.word, ": instance '", inst->instance_id, "' has dim ", v.size(), ", expected ", dim));
    auto& acc = sums[inst->gold];
    if (acc.empty()) acc.assign(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) acc[i] += v[i];
    ++table.support[inst->gold];
  }
  for (auto& [c, acc] : sums) {
    const double n = static_cast<double>(table.support[c]);
    Vec centroid(dim);
    for (std::size_t i = 0; i < dim; ++i) centroid[i] = static_cast<float>(acc[i] / n);
    table.centroids.emplace(c, std::move(centroid));
  }

  std::size_t best = 0;
  for (const auto& [c, n] : table.support) {
    if (n > best) {
      best = n;
      table.mfs = c;
    }
  }
  return table;
}

inline nlohmann::json sense_table_sidecar(const SenseTable& t) {
  nlohmann::json support = nlohmann::json::object();
  for (const auto& [c, n] : t.support) support[std::to_string(c)] = n;
  return {{"word", t.word}, {"pooling", t.pooling.to_string()}, {"support", support}, {"mfs", t.mfs}};
}

// Writes <prefix>.cwse (centroids as records "sense:<class>", one layer 0
// entry each) and <prefix>.json (word, pooling, support, mfs).
inline void write_sense_table(const std::filesystem::path& prefix, const SenseTable& t) {
  std::vector<InstanceEmbedding> records;
  for (const auto& [c, v] : t.centroids) records.push_back({detail::cat("sense:", c), {{0, v}}, false});
  std::filesystem::path bin = prefix, json = prefix;
  bin += ".cwse";
  json += ".json";
  write_cache(bin, records);
  write_file_atomic(json, sense_table_sidecar(t).dump(2) + "\n");
}

inline SenseTable read_sense_table(const std::filesystem::path& prefix) {
  std::filesystem::path bin = prefix, json = prefix;
  bin += ".cwse";
  json += ".json";
  SenseTable t;
  try {
    auto j = nlohmann::json::parse(read_file(json));
    t.word = j.at("word").get<std::string>();
    t.pooling = PoolingSpec::parse(j.at("pooling").get<std::string>());
    t.mfs = j.at("mfs").get<int>();
    for (auto it = j.at("support").begin(); it != j.at("support").end(); ++it)
      t.support[std::stoi(it.key())] = it.value().get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(detail::cat(json.string(), ": ", e.what()));
  }
  for (auto& r : read_cache(bin)) {
    if (!r.instance_id.starts_with("sense:") || r.layers.size() != 1)
      throw FormatError(detail::cat(bin.string(), ": unexpected record '", r.instance_id, "'"));
    int c = std::stoi(r.instance_id.substr(6));
    t.centroids.emplace(c, std::move(r.layers.begin()->second));
  }
  for (const auto& [c, v] : t.centroids) {
    if (!t.support.count(c))
      throw FormatError(detail::cat(json.string(), ": no support entry for class ", c));
  }
  return t;
}

}  // namespace cwsd
