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

// Builds a per-word dataset from hyperlink-annotated sentences.
//
// Input is JSONL, one {"tokens":[...],"target_index":int,"link_title":str}
// per line, as produced by any Wikipedia dump link extractor (for example
// WikiExtractor with --links, followed by sentence splitting and
// tokenization). The pipeline is:
//
//   dedupe -> collect_candidates -> split_dataset
//
// and every removal is kept so a reviewer can audit it.

#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwsd/common.hpp"
#include "cwsd/corpus.hpp"

namespace cwsd {

struct AnnotatedSentence {
  std::vector<std::string> tokens;
  std::size_t target_index = 0;
  std::string link_title;

  bool operator==(const AnnotatedSentence&) const = default;
};

inline std::vector<AnnotatedSentence> parse_annotated_jsonl(std::istream& in, const std::string& context = "input") {
  std::vector<AnnotatedSentence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    try {
      auto j = nlohmann::json::parse(line);
      AnnotatedSentence s{j.at("tokens").get<std::vector<std::string>>(), j.at("target_index").get<std::size_t>(),
                          j.at("link_title").get<std::string>()};
      if (s.tokens.empty() || s.target_index >= s.tokens.size())
        throw FormatError(detail::cat(context, ':', lineno, ": target_index out of range"));
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(detail::cat(context, ':', lineno, ": ", e.what()));
    }
  }
  return out;
}

inline nlohmann::json to_json(const AnnotatedSentence& s) {
  return {{"tokens", s.tokens}, {"target_index", s.target_index}, {"link_title", s.link_title}};
}

struct Removal {
  std::string reason;  // "duplicate", "too_short" or "target_absent"
  AnnotatedSentence sentence;
};

struct DedupeResult {
  std::vector<AnnotatedSentence> kept;
  std::vector<Removal> removed;

  std::size_t count(std::string_view reason) const {
    return static_cast<std::size_t>(
        std::count_if(removed.begin(), removed.end(), [&](const Removal& r) { return r.reason == reason; }));
  }
};

// Lowercases, then removes sentences whose target token is not `word`,
// sentences shorter than `min_tokens`, and exact repeats of an earlier
// token sequence (first occurrence wins).
inline DedupeResult dedupe(std::span<const AnnotatedSentence> sentences, const std::string& word,
                           std::size_t min_tokens = 5) {
  DedupeResult res;
  const std::string target = to_lower(word);
  std::unordered_set<std::string> seen;
  for (const auto& raw : sentences) {
    AnnotatedSentence s = raw;
    for (auto& t : s.tokens) t = to_lower(t);
    if (s.target_index >= s.tokens.size() || s.tokens[s.target_index] != target) {
      res.removed.push_back({"target_absent", std::move(s)});
      continue;
    }
    if (s.tokens.size() < min_tokens) {
      res.removed.push_back({"too_short", std::move(s)});
      continue;
    }
    std::string key;
    for (const auto& t : s.tokens) {
      key += t;
      key += '\x1f';
    }
    if (!seen.insert(std::move(key)).second) {
      res.removed.push_back({"duplicate", std::move(s)});
      continue;
    }
    res.kept.push_back(std::move(s));
  }
  return res;
}

struct SenseBucket {
  std::string sense_id;
  std::vector<AnnotatedSentence> sentences;
};

struct CandidateSet {
  // Retained senses, most frequent first (ties by sense id).
  std::vector<SenseBucket> senses;
  // Senses below the occurrence minimum, with their counts.
  std::vector<std::pair<std::string, std::size_t>> dropped;
  std::size_t unmapped = 0;
  std::size_t off_target = 0;
};

// Buckets sentences by the sense their link title maps to. Sentences with an
// unmapped title are discarded and counted.
inline CandidateSet collect_candidates(std::span<const AnnotatedSentence> sentences, const std::string& word,
                                       const std::map<std::string, std::string>& sense_map,
                                       std::size_t min_occurrences = 30) {
  CandidateSet out;
  const std::string target = to_lower(word);
  std::map<std::string, std::vector<AnnotatedSentence>> buckets;
  std::size_t matched = 0;
  for (const auto& raw : sentences) {
    AnnotatedSentence s = raw;
    for (auto& t : s.tokens) t = to_lower(t);
    if (s.target_index >= s.tokens.size() || s.tokens[s.target_index] != target) {
      ++out.off_target;
      continue;
    }
    ++matched;
    auto it = sense_map.find(s.link_title);
    if (it == sense_map.end()) {
      ++out.unmapped;
      continue;
    }
    buckets[it->second].push_back(std::move(s));
  }
  if (!sentences.empty() && matched == 0)
    throw Error(detail::cat("word '", word, "' is not the target of any input sentence"));

  for (auto& [sid, list] : buckets) {
    if (list.size() < min_occurrences) {
      out.dropped.emplace_back(sid, list.size());
    } else {
      out.senses.push_back({sid, std::move(list)});
    }
  }
  std::stable_sort(out.senses.begin(), out.senses.end(), [](const SenseBucket& a, const SenseBucket& b) {
    return a.sentences.size() > b.sentences.size();
  });
  return out;
}

// Per sense: seeded shuffle, the first ceil(ratio * count) go to train and
// the rest to test. A sense whose train share would take everything gives
// one sentence back to test.
inline std::size_t train_share(double ratio, std::size_t count) {
  auto n = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(count) - 1e-9));
  if (n >= count) n = count - 1;
  return n;
}

inline WordDataset split_dataset(const std::string& word, const CandidateSet& candidates, double ratio,
                                 std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(detail::cat("split ratio must be in (0, 1), got ", ratio));
  WordDataset ds;
  ds.word = word;
  for (std::size_t c = 0; c < candidates.senses.size(); ++c) {
    const auto& bucket = candidates.senses[c];
    if (bucket.sentences.size() < 2)
      throw Error(detail::cat(word, ": sense '", bucket.sense_id, "' has ", bucket.sentences.size(),
                              " sentence(s), need at least 2 to fill both splits"));
    ds.senses.push_back({static_cast<int>(c), bucket.sense_id, std::nullopt});
    std::vector<std::size_t> order(bucket.sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(seed, word + "/" + bucket.sense_id));
    rng.shuffle(order);
    const std::size_t n_train = train_share(ratio, order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& s = bucket.sentences[order[i]];
      Instance inst{"", s.tokens, s.target_index, static_cast<int>(c), std::nullopt};
      (i < n_train ? ds.train : ds.test).push_back(std::move(inst));
    }
  }
  for (std::size_t i = 0; i < ds.train.size(); ++i) ds.train[i].instance_id = detail::cat("train.", i + 1);
  for (std::size_t i = 0; i < ds.test.size(); ++i) ds.test[i].instance_id = detail::cat("test.", i + 1);
  return ds;
}

struct BuildOptions {
  double ratio = 0.6;
  std::uint64_t seed = 0;
  std::size_t min_occurrences = 30;
  std::size_t min_tokens = 5;
};

struct BuildResult {
  WordDataset dataset;
  nlohmann::json report;
};

inline BuildResult build_dataset(std::span<const AnnotatedSentence> sentences, const std::string& word,
                                 const std::map<std::string, std::string>& sense_map, const BuildOptions& opts = {}) {
  DedupeResult dd = dedupe(sentences, word, opts.min_tokens);
  if (!sentences.empty() && dd.kept.empty() && dd.count("target_absent") == sentences.size())
    throw Error(detail::cat("word '", word, "' is not the target of any input sentence"));
  CandidateSet cand = collect_candidates(dd.kept, word, sense_map, opts.min_occurrences);
  if (cand.senses.size() < 2)
    throw Error(detail::cat(word, ": ", cand.senses.size(), " sense(s) reach ", opts.min_occurrences,
                            " occurrences, need at least 2"));
  BuildResult res;
  res.dataset = split_dataset(word, cand, opts.ratio, opts.seed);

  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& [sid, n] : cand.dropped) dropped.push_back({{"sense_id", sid}, {"count", n}});
  nlohmann::json split = nlohmann::json::object();
  auto train = res.dataset.counts(Split::train), test = res.dataset.counts(Split::test);
  for (const auto& s : res.dataset.senses) {
    const auto c = static_cast<std::size_t>(s.class_index);
    split[s.sense_id] = {{"class_index", s.class_index}, {"train", train[c]}, {"test", test[c]}};
  }
  nlohmann::json removals = nlohmann::json::array();
  for (const auto& r : dd.removed) removals.push_back({{"reason", r.reason}, {"sentence", to_json(r.sentence)}});
  res.report = {{"word", word},
                {"ratio", opts.ratio},
                {"seed", opts.seed},
                {"min_occurrences", opts.min_occurrences},
                {"input_sentences", sentences.size()},
                {"removed",
                 {{"target_absent", dd.count("target_absent")},
                  {"too_short", dd.count("too_short")},
                  {"duplicate", dd.count("duplicate")}}},
                {"unmapped", cand.unmapped},
                {"dropped_senses", dropped},
                {"split", split},
                {"train_total", res.dataset.train.size()},
                {"test_total", res.dataset.test.size()},
                {"removals", removals}};
  return res;
}

}  // namespace cwsd
