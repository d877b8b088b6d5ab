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

// HTTP transport for the embedding provider (GET /info, POST /embed).
// Kept apart from embedding.hpp so that only ingestion pulls in httplib.

#pragma once

#include <chrono>
#include <future>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cwsd/embedding.hpp"

namespace cwsd {

// Network-level failure; callers may retry.
class TransportError : public Error {
 public:
  using Error::Error;
};

struct FetchOptions {
  std::size_t batch_size = 32;
  int retries = 3;
  int threads = 1;
  std::chrono::milliseconds retry_delay{200};
  std::chrono::seconds timeout{120};
};

class ProviderClient {
 public:
  explicit ProviderClient(std::string url, std::chrono::seconds timeout = std::chrono::seconds{120})
      : url_(std::move(url)), client_(url_) {
    client_.set_connection_timeout(timeout);
    client_.set_read_timeout(timeout);
    client_.set_write_timeout(timeout);
  }

  ProviderInfo info() {
    auto res = client_.Get("/info");
    return parse_info(checked_json(res, "/info"));
  }

  std::vector<InstanceEmbedding> embed(const ProviderInfo& info, std::span<const Instance> batch,
                                       const LayerSelection& layers) {
    const std::string body = make_embed_request(batch, layers).dump();
    auto res = client_.Post("/embed", body, "application/json");
    return parse_embed_response(checked_json(res, "/embed"), info, batch, layers);
  }

  const std::string& url() const { return url_; }

 private:
  nlohmann::json checked_json(const httplib::Result& res, const char* path) {
    if (!res)
      throw TransportError(detail::cat(url_, path, ": ", httplib::to_string(res.error())));
    if (res->status != 200)
      throw ProtocolError(detail::cat(url_, path, ": HTTP ", res->status, ": ", res->body));
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProtocolError(detail::cat(url_, path, ": response is not JSON: ", e.what()));
    }
  }

  std::string url_;
  httplib::Client client_;
};

// One record per instance in input order. Instances whose target token was
// truncated away come back with `truncated` set and no layers. Batches may
// be in flight concurrently; each worker owns its own connection.
inline std::vector<InstanceEmbedding> fetch_embeddings(const std::string& url, std::span<const Instance> instances,
                                                       const LayerSelection& layers,
                                                       const FetchOptions& opts = {}) {
  if (opts.batch_size == 0) throw Error("fetch_embeddings: batch size must be positive");
  ProviderInfo info = ProviderClient(url, opts.timeout).info();
  if (layers) {
    for (int l : *layers) {
      if (l < 0 || l > info.n_layers)
        throw Error(detail::cat("requested layer ", l, " outside provider range [0, ", info.n_layers, "]"));
    }
  }

  const std::size_t n_batches = (instances.size() + opts.batch_size - 1) / opts.batch_size;
  std::vector<std::vector<InstanceEmbedding>> batches(n_batches);

  auto run_batch = [&](ProviderClient& client, std::size_t b) {
    auto slice = instances.subspan(b * opts.batch_size,
                                   std::min(opts.batch_size, instances.size() - b * opts.batch_size));
    for (int attempt = 0;; ++attempt) {
      try {
        batches[b] = client.embed(info, slice, layers);
        return;
      } catch (const TransportError&) {
        if (attempt >= opts.retries) throw;
        std::this_thread::sleep_for(opts.retry_delay * (attempt + 1));
      }
    }
  };

  const int workers = std::max(1, std::min<int>(opts.threads, static_cast<int>(n_batches)));
  std::vector<std::future<void>> futures;
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      ProviderClient client(url, opts.timeout);
      for (std::size_t b = static_cast<std::size_t>(w); b < n_batches; b += static_cast<std::size_t>(workers))
        run_batch(client, b);
    }));
  }
  for (auto& f : futures) f.get();

  std::vector<InstanceEmbedding> out;
  out.reserve(instances.size());
  for (auto& b : batches) {
    for (auto& e : b) out.push_back(std::move(e));
  }
  return out;
}

}  // namespace cwsd
