// Copyright 2026 The AnonRAG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ANONRAG_MOCKS_H_
#define ANONRAG_MOCKS_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "anonrag/clients.h"
#include "anonrag/pii.h"

namespace httplib {
class Server;
}

namespace anonrag {

// Deterministic pseudo-embedding: each token hashes to a fixed random
// vector, a text embeds to the normalized sum of its token vectors.
// Identical texts get identical vectors; texts sharing words are close.
class HashEmbeddingClient : public EmbeddingClient {
 public:
  explicit HashEmbeddingClient(std::size_t dimension = 64,
                               std::uint64_t seed = 0);
  std::vector<Vector> Embed(const std::vector<std::string>& texts) override;
  Vector EmbedOne(const std::string& text) const;
  std::size_t calls() const { return calls_; }

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
  std::atomic<std::size_t> calls_{0};
};

// Offline stand-in for the chat model. Recognizes the prompts this library
// sends and answers them deterministically:
//  - summary: three attribute sections built from the context sentences
//  - PII detection: entities found by the rule detector
//  - judge: per-category share of the original's entities found in the
//    second text, as a JSON report
//  - synthetic replacement: placeholders filled with fixed fakes
//  - paraphrase: the document echoed back
// Every request is logged for audit.
class MockGenerationClient : public GenerationClient {
 public:
  struct Request {
    std::string prompt;
    double temperature;
  };

  explicit MockGenerationClient(PiiDetector detector = {});

  std::string Complete(const std::string& prompt, double temperature) override;

  std::vector<Request> requests() const;
  std::size_t request_count() const;
  // Calls after the first n throw TransportError.
  void FailAfter(std::size_t n);
  // Consulted before the built-in responders.
  void SetOverride(
      std::function<std::optional<std::string>(const std::string&)> fn);

  static std::string Summarize(std::string_view context);
  std::string ListPii(std::string_view context) const;
  std::string JudgeJson(std::string_view original,
                        std::string_view second) const;
  static std::string FillPlaceholders(std::string_view labeled);

 private:
  PiiDetector detector_;
  mutable std::mutex mu_;
  std::vector<Request> log_;
  std::optional<std::size_t> fail_after_;
  std::function<std::optional<std::string>(const std::string&)> override_;
};

// Offline stand-in for the word-level DP rewriter: each word is replaced
// with probability 1 / (1 + epsilon / 25) by a word picked by hash.
class MockRewriterClient : public RewriterClient {
 public:
  explicit MockRewriterClient(std::uint64_t seed = 0) : seed_(seed) {}
  std::string Rewrite(const std::string& text, double epsilon) override;

 private:
  std::uint64_t seed_;
};

// Local HTTP server speaking the endpoint contracts: /v1/chat/completions,
// /v1/embeddings, /rewrite and /nll, backed by the mocks above.
class MockEndpointServer {
 public:
  MockEndpointServer(MockGenerationClient& gen, HashEmbeddingClient& embed,
                     RewriterClient& rewriter, NllScorer* scorer = nullptr);
  ~MockEndpointServer();

  // Binds to 127.0.0.1 on the given port (0 picks a free one).
  int Start(int port = 0);
  void Stop();
  std::string base_url() const;  // http://127.0.0.1:PORT

  // The next n requests answer HTTP 503.
  void FailNext(int n) { fail_next_ = n; }
  int hits() const { return hits_; }

 private:
  MockGenerationClient& gen_;
  HashEmbeddingClient& embed_;
  RewriterClient& rewriter_;
  NllScorer* scorer_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> fail_next_{0};
  std::atomic<int> hits_{0};
};

}  // namespace anonrag

#endif  // ANONRAG_MOCKS_H_
