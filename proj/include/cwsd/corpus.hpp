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

// Per-word datasets in the CoarseWSD-20 directory layout.
//
// A word directory holds:
//   classes_map.txt      JSON object, class index -> sense id
//   <split>.data.txt     TARGET_INDEX<TAB>space separated tokens
//   <split>.gold.txt     one class index per line, aligned with data
//   <split>.group.txt    optional, one group tag per line
//   definitions.txt      optional, SENSE_ID<TAB>definition
// for split in {train, test, ood_test}. train and test are required.
//
// Every file written by this module ends each line with LF, including the
// last one.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwsd/common.hpp"

namespace cwsd {

struct SenseLabel {
  int class_index = 0;
  std::string sense_id;
  std::optional<std::string> definition;

  bool operator==(const SenseLabel&) const = default;
};

struct Instance {
  std::string instance_id;
  std::vector<std::string> tokens;
  std::size_t target_index = 0;
  int gold = 0;
  std::optional<std::string> group;

  const std::string& target() const { return tokens.at(target_index); }

  bool operator==(const Instance&) const = default;
};

enum class Split { train, test, ood_test };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::test: return "test";
    case Split::ood_test: return "ood_test";
  }
  return "?";
}

inline Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "test") return Split::test;
  if (name == "ood_test") return Split::ood_test;
  throw Error(detail::cat("unknown split '", name, "'"));
}

struct WordDataset {
  std::string word;
  std::vector<SenseLabel> senses;
  std::vector<Instance> train;
  std::vector<Instance> test;
  std::vector<Instance> ood_test;
  // Non-fatal findings from loading, e.g. a sense without train instances.
  std::vector<std::string> warnings;

  int polysemy() const { return static_cast<int>(senses.size()); }

  const std::vector<Instance>& instances(Split s) const {
    switch (s) {
      case Split::train: return train;
      case Split::test: return test;
      case Split::ood_test: return ood_test;
    }
    return train;
  }
  std::vector<Instance>& instances(Split s) {
    return const_cast<std::vector<Instance>&>(
        static_cast<const WordDataset&>(*this).instances(s));
  }

  // Per-class instance counts for a split, indexed by class_index.
  std::vector<long long> counts(Split s) const {
    std::vector<long long> c(senses.size(), 0);
    for (const auto& inst : instances(s)) ++c.at(static_cast<std::size_t>(inst.gold));
    return c;
  }

  // Largest train count, ties to the lowest class index.
  int mfs() const { return most_frequent(counts(Split::train)); }
  // Smallest train count, ties to the lowest class index.
  int lfs() const {
    auto c = counts(Split::train);
    return static_cast<int>(std::min_element(c.begin(), c.end()) - c.begin());
  }

  static int most_frequent(const std::vector<long long>& c) {
    return static_cast<int>(std::max_element(c.begin(), c.end()) - c.begin());
  }
};

struct WordStats {
  std::string word;
  int polysemy = 0;
  std::vector<long long> train_counts;
  std::vector<long long> test_counts;
  // First-sense train count over the sum of the remaining train counts.
  long long f2r_numerator = 0;
  long long f2r_denominator = 0;
  double entropy_train = 0.0;
  double entropy_test = 0.0;

  double f2r() const {
    if (f2r_denominator == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(f2r_numerator) /
           static_cast<double>(f2r_denominator);
  }
  long long train_total() const {
    long long s = 0;
    for (auto c : train_counts) s += c;
    return s;
  }
  long long test_total() const {
    long long s = 0;
    for (auto c : test_counts) s += c;
    return s;
  }
};

// -sum f_i log f_i / log n over nonzero frequencies, n = counts.size().
inline double normalized_entropy(std::span<const long long> counts) {
  long long total = 0;
  for (auto c : counts) {
    if (c < 0) throw Error("normalized_entropy: negative count");
    total += c;
  }
  if (total == 0) throw Error("normalized_entropy: all counts are zero");
  if (counts.size() < 2) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double f = static_cast<double>(c) / static_cast<double>(total);
    h -= f * std::log(f);
  }
  // A single nonzero count gives h == -0.0; normalize the sign.
  return h <= 0.0 ? 0.0 : h / std::log(static_cast<double>(counts.size()));
}

inline double normalized_entropy(const std::vector<long long>& counts) {
  return normalized_entropy(std::span<const long long>(counts));
}

inline WordStats word_stats(const WordDataset& ds) {
  WordStats st;
  st.word = ds.word;
  st.polysemy = ds.polysemy();
  st.train_counts = ds.counts(Split::train);
  st.test_counts = ds.counts(Split::test);
  if (!st.train_counts.empty()) {
    st.f2r_numerator = st.train_counts.front();
    for (std::size_t i = 1; i < st.train_counts.size(); ++i)
      st.f2r_denominator += st.train_counts[i];
  }
  st.entropy_train = st.train_total() > 0 ? normalized_entropy(st.train_counts) : 0.0;
  st.entropy_test = st.test_total() > 0 ? normalized_entropy(st.test_counts) : 0.0;
  return st;
}

inline std::string stats_csv_header() {
  return "word,polysemy,f2r,entropy_train,entropy_test,train_total,test_total\n";
}

// One CSV row at the table's precision: F2R to 1 decimal, entropies to 2.
inline std::string stats_csv_row(const WordStats& st) {
  return detail::cat(st.word, ',', st.polysemy, ',', format_fixed(st.f2r(), 1),
                     ',', format_fixed(st.entropy_train, 2), ',',
                     format_fixed(st.entropy_test, 2), ',', st.train_total(),
                     ',', st.test_total(), '\n');
}

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::vector<std::string> lines;
  if (text.empty()) return lines;
  lines = split_string(text, '\n');
  // Trailing LF terminates the last line rather than opening a new one.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return lines;
}

inline std::string where(const std::filesystem::path& path, std::size_t line) {
  return cat(path.string(), ":", line);
}

inline long long parse_int(std::string_view s, const std::filesystem::path& path,
                           std::size_t line, std::string_view what) {
  if (s.empty()) throw FormatError(cat(where(path, line), ": empty ", what));
  long long v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw FormatError(cat(where(path, line), ": malformed ", what, " '", s, "'"));
    v = v * 10 + (c - '0');
    if (v > (1LL << 40))
      throw FormatError(cat(where(path, line), ": ", what, " out of range"));
  }
  return v;
}

inline std::vector<SenseLabel> read_classes_map(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(cat(path.string(), ": invalid JSON: ", e.what()));
  }
  if (!j.is_object()) throw FormatError(cat(path.string(), ": expected a JSON object"));
  std::map<long long, std::string> by_index;
  for (auto it = j.begin(); it != j.end(); ++it) {
    long long idx = parse_int(it.key(), path, 1, "class index");
    if (!it.value().is_string())
      throw FormatError(cat(path.string(), ": sense id for class ", it.key(), " is not a string"));
    by_index[idx] = it.value().get<std::string>();
  }
  std::vector<SenseLabel> senses;
  std::set<std::string> seen;
  long long expected = 0;
  for (const auto& [idx, sid] : by_index) {
    if (idx != expected)
      throw FormatError(cat(path.string(), ": class indices not contiguous from 0 (missing ", expected, ")"));
    if (sid.empty()) throw FormatError(cat(path.string(), ": empty sense id for class ", idx));
    if (!seen.insert(sid).second)
      throw FormatError(cat(path.string(), ": duplicate sense id '", sid, "'"));
    senses.push_back({static_cast<int>(idx), sid, std::nullopt});
    ++expected;
  }
  return senses;
}

inline std::vector<Instance> read_split(const std::filesystem::path& dir, Split split,
                                        int n_classes) {
  namespace fs = std::filesystem;
  const std::string name = split_name(split);
  const fs::path data_path = dir / (name + ".data.txt");
  const fs::path gold_path = dir / (name + ".gold.txt");
  const fs::path group_path = dir / (name + ".group.txt");
  if (!fs::exists(data_path)) throw Error(cat("missing file ", data_path.string()));
  if (!fs::exists(gold_path)) throw Error(cat("missing file ", gold_path.string()));
  auto data = read_lines(data_path);
  auto gold = read_lines(gold_path);
  if (gold.size() > data.size())
    throw FormatError(cat(where(gold_path, data.size() + 1),
                          ": gold line has no matching data line"));
  if (data.size() > gold.size())
    throw FormatError(cat(where(data_path, gold.size() + 1),
                          ": data line has no matching gold line"));
  std::vector<std::string> groups;
  if (fs::exists(group_path)) {
    groups = read_lines(group_path);
    if (groups.size() != data.size())
      throw FormatError(cat(group_path.string(), ": ", groups.size(),
                            " lines, expected ", data.size()));
  }

  std::vector<Instance> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t line = i + 1;
    const std::string& row = data[i];
    auto tab = row.find('\t');
    if (tab == std::string::npos)
      throw FormatError(cat(where(data_path, line), ": expected TARGET_INDEX<TAB>tokens"));
    Instance inst;
    inst.instance_id = cat(name, '.', line);
    inst.target_index = static_cast<std::size_t>(
        parse_int(std::string_view(row).substr(0, tab), data_path, line, "target index"));
    for (auto& tok : split_string(std::string_view(row).substr(tab + 1), ' ')) {
      if (!tok.empty()) inst.tokens.push_back(std::move(tok));
    }
    if (inst.tokens.empty())
      throw FormatError(cat(where(data_path, line), ": empty sentence"));
    if (inst.target_index >= inst.tokens.size())
      throw FormatError(cat(where(data_path, line), ": target index ", inst.target_index,
                            " out of range for ", inst.tokens.size(), " tokens"));
    long long g = parse_int(gold[i], gold_path, line, "gold class");
    if (g >= n_classes)
      throw FormatError(cat(where(gold_path, line), ": gold class ", g,
                            " not in classes map"));
    inst.gold = static_cast<int>(g);
    if (!groups.empty() && !groups[i].empty()) inst.group = groups[i];
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace detail

inline WordDataset load_word_dataset(const std::filesystem::path& root,
                                     const std::string& word) {
  namespace fs = std::filesystem;
  const fs::path dir = root / word;
  const fs::path classes = dir / "classes_map.txt";
  if (!fs::exists(classes)) throw Error(detail::cat("missing file ", classes.string()));

  WordDataset ds;
  ds.word = word;
  ds.senses = detail::read_classes_map(classes);
  const int k = ds.polysemy();
  if (k < 2)
    ds.warnings.push_back(detail::cat(word, ": polysemy ", k, " < 2"));

  const fs::path defs = dir / "definitions.txt";
  if (fs::exists(defs)) {
    auto lines = detail::read_lines(defs);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      auto tab = lines[i].find('\t');
      if (tab == std::string::npos)
        throw FormatError(detail::where(defs, i + 1) + ": expected SENSE_ID<TAB>definition");
      std::string sid = lines[i].substr(0, tab);
      auto it = std::find_if(ds.senses.begin(), ds.senses.end(),
                             [&](const SenseLabel& s) { return s.sense_id == sid; });
      if (it == ds.senses.end())
        throw FormatError(detail::where(defs, i + 1) + ": unknown sense id '" + sid + "'");
      it->definition = lines[i].substr(tab + 1);
    }
  }

  ds.train = detail::read_split(dir, Split::train, k);
  ds.test = detail::read_split(dir, Split::test, k);
  if (fs::exists(dir / "ood_test.data.txt"))
    ds.ood_test = detail::read_split(dir, Split::ood_test, k);

  auto train_counts = ds.counts(Split::train);
  for (int c = 0; c < k; ++c) {
    if (train_counts[static_cast<std::size_t>(c)] == 0)
      ds.warnings.push_back(detail::cat(word, ": sense '", ds.senses[static_cast<std::size_t>(c)].sense_id,
                                        "' has no train instances"));
  }
  return ds;
}

// Word directories under root, sorted by name.
inline std::vector<std::string> list_words(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root))
    throw Error(detail::cat("data root ", root.string(), " is not a directory"));
  std::vector<std::string> words;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "classes_map.txt"))
      words.push_back(entry.path().filename().string());
  }
  std::sort(words.begin(), words.end());
  return words;
}

inline std::string encode_classes_map(const std::vector<SenseLabel>& senses) {
  std::string out = "{";
  for (std::size_t i = 0; i < senses.size(); ++i) {
    if (i) out += ", ";
    out += detail::cat('"', senses[i].class_index, "\": ",
                       nlohmann::json(senses[i].sense_id).dump());
  }
  out += "}\n";
  return out;
}

inline void write_word_dataset(const WordDataset& ds, const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  const fs::path dir = root / ds.word;
  fs::create_directories(dir);
  write_file_atomic(dir / "classes_map.txt", encode_classes_map(ds.senses));

  std::string defs;
  for (const auto& s : ds.senses) {
    if (s.definition) defs += s.sense_id + '\t' + *s.definition + '\n';
  }
  if (!defs.empty()) write_file_atomic(dir / "definitions.txt", defs);

  for (Split split : {Split::train, Split::test, Split::ood_test}) {
    const auto& insts = ds.instances(split);
    if (split == Split::ood_test && insts.empty()) continue;
    std::string data, gold, group;
    bool any_group = false;
    for (const auto& inst : insts) {
      data += std::to_string(inst.target_index);
      data += '\t';
      for (std::size_t t = 0; t < inst.tokens.size(); ++t) {
        if (t) data += ' ';
        data += inst.tokens[t];
      }
      data += '\n';
      gold += std::to_string(inst.gold) + '\n';
      group += inst.group.value_or("") + '\n';
      any_group = any_group || inst.group.has_value();
    }
    const std::string name = split_name(split);
    write_file_atomic(dir / (name + ".data.txt"), data);
    write_file_atomic(dir / (name + ".gold.txt"), gold);
    if (any_group) write_file_atomic(dir / (name + ".group.txt"), group);
  }
}

}  // namespace cwsd
