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

#ifndef ANONRAG_CLIENTS_H_
#define ANONRAG_CLIENTS_H_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace anonrag {

using Vector = std::vector<double>;

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;

  // Backoff before attempt number `attempt` (1-based, attempt >= 2).
  std::chrono::milliseconds BackoffBefore(int attempt) const;
};

// Counting limiter for in-flight requests.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(std::size_t limit);

  class Slot {
   public:
    explicit Slot(ConcurrencyLimiter& limiter);
    ~Slot();
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    ConcurrencyLimiter& limiter_;
  };

  std::size_t limit() const { return limit_; }
  std::size_t peak() const;

 private:
  void Acquire();
  void Release();

  const std::size_t limit_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::size_t peak_ = 0;
};

// Runs `attempt` until it succeeds or the policy is exhausted. `attempt`
// returns nullopt for a retryable failure and fills `last_error`; it throws
// for a permanent one. The final failure is reported as TransportError.
nlohmann::json RunWithRetry(
    const RetryPolicy& policy, const std::string& what,
    const std::function<std::optional<nlohmann::json>(std::string& last_error)>&
        attempt);

class GenerationClient {
 public:
  virtual ~GenerationClient() = default;
  // Single-turn completion. Implementations return the raw model text.
  virtual std::string Complete(const std::string& prompt,
                               double temperature) = 0;
  // Highest sampling temperature the endpoint accepts.
  virtual double max_temperature() const { return 2.0; }
};

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  // One vector per input, in input order.
  virtual std::vector<Vector> Embed(const std::vector<std::string>& texts) = 0;
};

struct NllResult {
  double mean_nll = 0;
  long token_count = 0;
};

class NllScorer {
 public:
  virtual ~NllScorer() = default;
  virtual NllResult Score(const std::string& text) = 0;
};

// Word-level DP rewriter endpoint: {"text", "epsilon"} -> {"text"}.
class RewriterClient {
 public:
  virtual ~RewriterClient() = default;
  virtual std::string Rewrite(const std::string& text, double epsilon) = 0;
};

struct EndpointConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model;
  std::string api_key;
  RetryPolicy retry;
  std::size_t max_in_flight = 4;
  std::chrono::seconds timeout{120};
};

// Thin JSON-over-HTTP POST helper shared by the endpoint clients.
class HttpJsonEndpoint {
 public:
  explicit HttpJsonEndpoint(EndpointConfig config);
  ~HttpJsonEndpoint();

  nlohmann::json Post(const std::string& path, const nlohmann::json& body);
  const EndpointConfig& config() const { return config_; }
  ConcurrencyLimiter& limiter() { return limiter_; }

 private:
  EndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  ConcurrencyLimiter limiter_;
};

// OpenAI-compatible /chat/completions.
class OpenAiGenerationClient : public GenerationClient {
 public:
  explicit OpenAiGenerationClient(EndpointConfig config);
  std::string Complete(const std::string& prompt, double temperature) override;

 private:
  HttpJsonEndpoint endpoint_;
};

// OpenAI-compatible /embeddings, batched.
class OpenAiEmbeddingClient : public EmbeddingClient {
 public:
  explicit OpenAiEmbeddingClient(EndpointConfig config,
                                 std::size_t batch_size = 64);
  std::vector<Vector> Embed(const std::vector<std::string>& texts) override;

 private:
  HttpJsonEndpoint endpoint_;
  std::size_t batch_size_;
};

class HttpRewriterClient : public RewriterClient {
 public:
  explicit HttpRewriterClient(EndpointConfig config);
  std::string Rewrite(const std::string& text, double epsilon) override;

 private:
  HttpJsonEndpoint endpoint_;
};

// {"text"} -> {"mean_nll", "token_count"}.
class HttpNllScorer : public NllScorer {
 public:
  explicit HttpNllScorer(EndpointConfig config);
  NllResult Score(const std::string& text) override;

 private:
  HttpJsonEndpoint endpoint_;
};

// Reads the URL and model variables plus ANONRAG_API_KEY. Returns nullopt
// when the URL variable is unset.
std::optional<EndpointConfig> EndpointFromEnvironment(
    const std::string& url_var, const std::string& model_var,
    const std::string& default_model);

}  // namespace anonrag

#endif  // ANONRAG_CLIENTS_H_
