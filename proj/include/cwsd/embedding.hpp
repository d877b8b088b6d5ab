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

// Contextual embeddings of target tokens: sub-word averaging, layer
// pooling, the binary cache and the provider wire messages. The HTTP
// transport lives in embedding_client.hpp.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwsd/common.hpp"
#include "cwsd/corpus.hpp"

namespace cwsd {

class ProtocolError : public Error {
 public:
  using Error::Error;
};

struct ProviderInfo {
  std::string model_name;
  int dim = 0;
  // Layer 0 is the input embedding layer; 1..n_layers are encoder outputs.
  int n_layers = 0;
  int max_tokens = 0;
};

struct InstanceEmbedding {
  std::string instance_id;
  std::map<int, Vec> layers;
  // Set by the provider when the target token did not survive truncation;
  // such records carry no layers and are never cached.
  bool truncated = false;

  std::size_t dim() const { return layers.empty() ? 0 : layers.begin()->second.size(); }

  bool operator==(const InstanceEmbedding&) const = default;
};

enum class PoolingMode { sum, mean, single };

struct PoolingSpec {
  PoolingMode mode = PoolingMode::sum;
  std::vector<int> layers;
  // Nonzero means "the last N layers available", resolved against a cache.
  int last_n = 0;

  static PoolingSpec single(int layer) { return {PoolingMode::single, {layer}, 0}; }
  static PoolingSpec sum_last(int n) { return {PoolingMode::sum, {}, n}; }

  bool resolved() const { return last_n == 0; }

  void validate() const {
    if (last_n < 0) throw Error("pooling: negative layer count");
    if (resolved() && layers.empty()) throw Error("pooling: empty layer list");
    if (mode == PoolingMode::single && (last_n > 1 || (resolved() && layers.size() != 1)))
      throw Error("pooling: single mode takes exactly one layer");
    for (int l : layers) {
      if (l < 0) throw Error(detail::cat("pooling: negative layer index ", l));
    }
  }

  // Replaces a relative "last N" selection with the N highest of `available`.
  PoolingSpec resolve(std::span<const int> available) const {
    if (resolved()) return *this;
    std::vector<int> sorted(available.begin(), available.end());
    std::sort(sorted.begin(), sorted.end());
    if (static_cast<int>(sorted.size()) < last_n)
      throw Error(detail::cat("pooling: need ", last_n, " layers, cache has ", sorted.size()));
    PoolingSpec out{mode, {sorted.end() - last_n, sorted.end()}, 0};
    out.validate();
    return out;
  }

  std::string to_string() const {
    std::string s = mode == PoolingMode::sum ? "sum" : mode == PoolingMode::mean ? "mean" : "single";
    s += ':';
    if (!resolved()) return s + "last" + std::to_string(last_n);
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(layers[i]);
    }
    return s;
  }

  // "sum:9,10,11,12", "mean:1,2", "single:5", "sum:last4".
  static PoolingSpec parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
      throw Error(detail::cat("pooling: expected MODE:LAYERS, got '", text, "'"));
    PoolingSpec p;
    auto mode = text.substr(0, colon);
    if (mode == "sum") p.mode = PoolingMode::sum;
    else if (mode == "mean") p.mode = PoolingMode::mean;
    else if (mode == "single") p.mode = PoolingMode::single;
    else throw Error(detail::cat("pooling: unknown mode '", mode, "'"));
    auto rest = text.substr(colon + 1);
    try {
      if (rest.starts_with("last")) {
        p.last_n = std::stoi(std::string(rest.substr(4)));
        if (p.last_n < 1) throw Error("pooling: last N needs N >= 1");
      } else {
        for (const auto& part : split_string(rest, ',')) p.layers.push_back(std::stoi(part));
      }
    } catch (const std::logic_error&) {
      throw Error(detail::cat("pooling: malformed layer list '", rest, "'"));
    }
    p.validate();
    return p;
  }

  bool operator==(const PoolingSpec&) const = default;
};

// Sum of the last four encoder layers.
inline PoolingSpec default_pooling() { return PoolingSpec::sum_last(4); }

// Arithmetic mean of sub-word piece vectors, accumulated in double.
inline Vec average_subwords(std::span<const Vec> pieces) {
  if (pieces.empty()) throw Error("average_subwords: no sub-word vectors");
  const std::size_t d = pieces.front().size();
  std::vector<double> acc(d, 0.0);
  for (const auto& p : pieces) {
    if (p.size() != d) throw Error("average_subwords: dimension mismatch between pieces");
    for (std::size_t i = 0; i < d; ++i) acc[i] += p[i];
  }
  Vec out(d);
  const double n = static_cast<double>(pieces.size());
  for (std::size_t i = 0; i < d; ++i) out[i] = static_cast<float>(acc[i] / n);
  return out;
}

inline Vec pool(const InstanceEmbedding& e, const PoolingSpec& spec) {
  if (!spec.resolved()) throw Error("pool: pooling spec not resolved against a cache");
  spec.validate();
  const Vec* first = nullptr;
  for (int l : spec.layers) {
    auto it = e.layers.find(l);
    if (it == e.layers.end())
      throw Error(detail::cat("pool: layer ", l, " absent from embedding '", e.instance_id, "'"));
    if (!first) first = &it->second;
    if (it->second.size() != first->size())
      throw Error(detail::cat("pool: dimension mismatch across layers of '", e.instance_id, "'"));
  }
  if (spec.mode == PoolingMode::single) return *first;
  std::vector<double> acc(first->size(), 0.0);
  for (int l : spec.layers) {
    const Vec& v = e.layers.at(l);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
  }
  const double scale = spec.mode == PoolingMode::mean ? 1.0 / static_cast<double>(spec.layers.size()) : 1.0;
  Vec out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] * scale);
  return out;
}

// Read-only lookup over cached embeddings by instance id.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::vector<InstanceEmbedding> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (!index_.emplace(records_[i].instance_id, i).second)
        throw Error(detail::cat("duplicate instance id '", records_[i].instance_id, "'"));
    }
  }

  const InstanceEmbedding* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  const InstanceEmbedding& at(const std::string& id) const {
    if (auto* e = find(id)) return *e;
    throw Error(detail::cat("no cached embedding for instance '", id, "'"));
  }

  // Layer indices present in every record.
  std::vector<int> layers() const {
    if (records_.empty()) return {};
    std::vector<int> out;
    for (const auto& [l, v] : records_.front().layers) {
      bool everywhere = std::all_of(records_.begin(), records_.end(), [&](const InstanceEmbedding& r) {
        return r.layers.count(l) > 0;
      });
      if (everywhere) out.push_back(l);
    }
    return out;
  }

  // Appends records from another store; ids must stay unique.
  void merge(const EmbeddingStore& other) {
    for (const auto& r : other.records_) {
      if (!index_.emplace(r.instance_id, records_.size()).second)
        throw Error(detail::cat("duplicate instance id '", r.instance_id, "'"));
      records_.push_back(r);
    }
  }

  const std::vector<InstanceEmbedding>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<InstanceEmbedding> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

// --- Binary cache -----------------------------------------------------------
//
// Little-endian. Header (24 bytes):
//   "CWSE" | version u32 = 1 | dim u32 | layer_count u16 | reserved u16 = 0 |
//   record_count u64
// Record:
//   id_len u16 | id bytes | layer_count x (layer_index u16 | dim x f32)

inline constexpr std::uint32_t kCacheVersion = 1;
inline constexpr std::size_t kCacheHeaderSize = 24;

namespace detail {

class ByteWriter {
 public:
  template <typename T>
  void put(T v) {
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
  }
  void put_f32(float f) { put(std::bit_cast<std::uint32_t>(f)); }
  void put_bytes(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string context) : data_(data), context_(std::move(context)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  std::string_view get_bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw FormatError(cat(context_, ": truncated at byte ", pos_));
  }
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string context_;
};

}  // namespace detail

inline std::string encode_cache(std::span<const InstanceEmbedding> records) {
  std::uint32_t dim = 0;
  std::uint16_t layer_count = 0;
  if (!records.empty()) {
    dim = static_cast<std::uint32_t>(records.front().dim());
    layer_count = static_cast<std::uint16_t>(records.front().layers.size());
  }
  detail::ByteWriter w;
  w.put_bytes("CWSE");
  w.put(kCacheVersion);
  w.put(dim);
  w.put(layer_count);
  w.put(std::uint16_t{0});
  w.put(static_cast<std::uint64_t>(records.size()));
  std::unordered_map<std::string_view, int> seen;
  for (const auto& r : records) {
    if (r.truncated) throw Error(detail::cat("cache: cannot store truncated instance '", r.instance_id, "'"));
    if (r.layers.size() != layer_count)
      throw Error(detail::cat("cache: record '", r.instance_id, "' has ", r.layers.size(),
                              " layers, expected ", layer_count));
    if (r.instance_id.size() > 0xffff) throw Error("cache: instance id too long");
    if (!seen.emplace(r.instance_id, 0).second)
      throw Error(detail::cat("cache: duplicate instance id '", r.instance_id, "'"));
    w.put(static_cast<std::uint16_t>(r.instance_id.size()));
    w.put_bytes(r.instance_id);
    for (const auto& [layer, v] : r.layers) {
      if (layer < 0 || layer > 0xffff) throw Error("cache: layer index out of range");
      if (v.size() != dim)
        throw Error(detail::cat("cache: record '", r.instance_id, "' layer ", layer, " has dim ",
                                v.size(), ", expected ", dim));
      w.put(static_cast<std::uint16_t>(layer));
      for (float f : v) w.put_f32(f);
    }
  }
  return w.take();
}

inline std::vector<InstanceEmbedding> decode_cache(std::string_view bytes,
                                                   const std::string& context = "cache") {
  detail::ByteReader r(bytes, context);
  if (r.get_bytes(4) != "CWSE") throw FormatError(context + ": bad magic");
  auto version = r.get<std::uint32_t>();
  if (version != kCacheVersion)
    throw FormatError(detail::cat(context, ": unsupported version ", version));
  const auto dim = r.get<std::uint32_t>();
  const auto layer_count = r.get<std::uint16_t>();
  if (r.get<std::uint16_t>() != 0) throw FormatError(context + ": reserved field is nonzero");
  const auto count = r.get<std::uint64_t>();
  // Every record needs at least its id length, so a count beyond the
  // remaining bytes is a corrupt header; reject before allocating.
  if (count > r.remaining() / 2)
    throw FormatError(detail::cat(context, ": record count ", count, " exceeds file size"));
  const double min_record = 2.0 + static_cast<double>(layer_count) * (2.0 + 4.0 * static_cast<double>(dim));
  if (static_cast<double>(count) * min_record > static_cast<double>(r.remaining()))
    throw FormatError(detail::cat(context, ": header (", count, " records, ", layer_count, " layers, dim ", dim,
                                  ") exceeds file size"));
  std::vector<InstanceEmbedding> out;
  out.reserve(static_cast<std::size_t>(count));
  std::unordered_map<std::string, int> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    InstanceEmbedding e;
    auto id_len = r.get<std::uint16_t>();
    e.instance_id = std::string(r.get_bytes(id_len));
    if (!seen.emplace(e.instance_id, 0).second)
      throw FormatError(detail::cat(context, ": duplicate instance id '", e.instance_id, "'"));
    for (std::uint16_t l = 0; l < layer_count; ++l) {
      int layer = r.get<std::uint16_t>();
      Vec v(dim);
      for (auto& f : v) f = r.get_f32();
      if (!e.layers.emplace(layer, std::move(v)).second)
        throw FormatError(detail::cat(context, ": record '", e.instance_id, "' repeats layer ", layer));
    }
    out.push_back(std::move(e));
  }
  if (r.remaining() != 0)
    throw FormatError(detail::cat(context, ": ", r.remaining(), " trailing bytes after ", count, " records"));
  return out;
}

inline void write_cache(const std::filesystem::path& path, std::span<const InstanceEmbedding> records) {
  write_file_atomic(path, encode_cache(records));
}

inline std::vector<InstanceEmbedding> read_cache(const std::filesystem::path& path) {
  return decode_cache(read_file(path), path.string());
}

inline std::filesystem::path cache_path(const std::filesystem::path& cache_dir, const std::string& word,
                                        Split split) {
  return cache_dir / (word + "." + split_name(split) + ".cwse");
}

// --- Provider wire messages ---------------------------------------------------

inline constexpr int kProtocolVersion = 1;

// nullopt requests every layer the provider has.
using LayerSelection = std::optional<std::vector<int>>;

inline ProviderInfo parse_info(const nlohmann::json& j) {
  try {
    const int version = j.at("protocol_version").get<int>();
    if (version != kProtocolVersion)
      throw ProtocolError(detail::cat("protocol version mismatch: provider speaks ", version,
                                      ", client speaks ", kProtocolVersion));
    ProviderInfo info{j.at("model_name").get<std::string>(), j.at("dim").get<int>(),
                      j.at("n_layers").get<int>(), j.at("max_tokens").get<int>()};
    if (info.dim < 1 || info.n_layers < 1 || info.max_tokens < 1)
      throw ProtocolError("provider info: dim, n_layers and max_tokens must be positive");
    return info;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(detail::cat("malformed /info response: ", e.what()));
  }
}

inline nlohmann::json make_embed_request(std::span<const Instance> instances, const LayerSelection& layers) {
  nlohmann::json req;
  req["layers"] = layers ? nlohmann::json(*layers) : nlohmann::json("all");
  auto& sentences = req["sentences"] = nlohmann::json::array();
  for (const auto& inst : instances)
    sentences.push_back({{"tokens", inst.tokens}, {"target_index", inst.target_index}});
  return req;
}

// Decodes an /embed response into one record per requested instance, in
// request order, averaging each layer's sub-word pieces. Ids are taken from
// `instances`.
inline std::vector<InstanceEmbedding> parse_embed_response(const nlohmann::json& j, const ProviderInfo& info,
                                                           std::span<const Instance> instances,
                                                           const LayerSelection& requested) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim != info.dim)
      throw ProtocolError(detail::cat("dimension mismatch: response dim ", dim, ", provider info dim ", info.dim));
    const auto layers = j.at("layers").get<std::vector<int>>();
    for (int l : layers) {
      if (l < 0 || l > info.n_layers)
        throw ProtocolError(detail::cat("response layer ", l, " outside [0, ", info.n_layers, "]"));
    }
    if (requested) {
      if (layers != *requested) throw ProtocolError("response layers differ from the requested layers");
    } else if (static_cast<int>(layers.size()) != info.n_layers + 1) {
      throw ProtocolError("response to an \"all\" request does not cover every layer");
    }
    const auto& results = j.at("results");
    if (!results.is_array() || results.size() != instances.size())
      throw ProtocolError(detail::cat("expected ", instances.size(), " results, got ",
                                      results.is_array() ? results.size() : 0));
    std::vector<InstanceEmbedding> out;
    out.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& res = results[i];
      InstanceEmbedding e;
      e.instance_id = instances[i].instance_id;
      e.truncated = res.at("truncated").get<bool>();
      if (e.truncated) {
        out.push_back(std::move(e));
        continue;
      }
      const auto& per_layer = res.at("target_subwords");
      if (!per_layer.is_array() || per_layer.size() != layers.size())
        throw ProtocolError(detail::cat("result ", i, ": expected ", layers.size(), " layer entries"));
      for (std::size_t li = 0; li < layers.size(); ++li) {
        auto pieces = per_layer[li].get<std::vector<Vec>>();
        for (const auto& p : pieces) {
          if (static_cast<int>(p.size()) != dim)
            throw ProtocolError(detail::cat("result ", i, " layer ", layers[li], ": vector of dim ", p.size(),
                                            ", expected ", dim));
        }
        Vec avg = average_subwords(pieces);
        if (std::all_of(avg.begin(), avg.end(), [](float f) { return std::isnan(f); }))
          throw ProtocolError(detail::cat("result ", i, " layer ", layers[li], ": all-NaN vector"));
        e.layers.emplace(layers[li], std::move(avg));
      }
      out.push_back(std::move(e));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(detail::cat("malformed /embed response: ", e.what()));
  }
}

}  // namespace cwsd
