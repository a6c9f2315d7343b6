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

#include "anonrag/clients.h"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "anonrag/errors.h"
#include "anonrag/text_util.h"

namespace anonrag {

std::chrono::milliseconds RetryPolicy::BackoffBefore(int attempt) const {
  double ms = static_cast<double>(initial_backoff.count()) *
              std::pow(multiplier, attempt - 2);
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

ConcurrencyLimiter::ConcurrencyLimiter(std::size_t limit)
    : limit_(std::max<std::size_t>(limit, 1)) {}

ConcurrencyLimiter::Slot::Slot(ConcurrencyLimiter& limiter)
    : limiter_(limiter) {
  limiter_.Acquire();
}
ConcurrencyLimiter::Slot::~Slot() { limiter_.Release(); }

void ConcurrencyLimiter::Acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return in_flight_ < limit_; });
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
}

void ConcurrencyLimiter::Release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

std::size_t ConcurrencyLimiter::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

nlohmann::json RunWithRetry(
    const RetryPolicy& policy, const std::string& what,
    const std::function<std::optional<nlohmann::json>(std::string&)>&
        attempt) {
  const int attempts = std::max(policy.max_attempts, 1);
  std::string last_error;
  for (int i = 1; i <= attempts; ++i) {
    if (i > 1) std::this_thread::sleep_for(policy.BackoffBefore(i));
    if (auto result = attempt(last_error)) return *std::move(result);
  }
  throw TransportError(what + " failed: " + last_error, attempts);
}

namespace {

bool IsRetryableStatus(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpJsonEndpoint::HttpJsonEndpoint(EndpointConfig config)
    : config_(std::move(config)), limiter_(config_.max_in_flight) {
  const std::string& url = config_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigurationError("endpoint URL needs a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = url;
  } else {
    scheme_host_port_ = url.substr(0, path_start);
    path_prefix_ = url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
      path_prefix_.pop_back();
    }
  }
}

HttpJsonEndpoint::~HttpJsonEndpoint() = default;

nlohmann::json HttpJsonEndpoint::Post(const std::string& path,
                                      const nlohmann::json& body) {
  ConcurrencyLimiter::Slot slot(limiter_);
  std::string full_path = path_prefix_ + path;
  if (full_path.empty()) full_path = "/";
  const std::string payload = body.dump();
  return RunWithRetry(
      config_.retry, "POST " + full_path,
      [&](std::string& last_error) -> std::optional<nlohmann::json> {
        httplib::Client client(scheme_host_port_);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
          headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = client.Post(full_path, headers, payload, "application/json");
        if (!res) {
          last_error = httplib::to_string(res.error());
          return std::nullopt;
        }
        if (res->status < 200 || res->status >= 300) {
          last_error = "HTTP " + std::to_string(res->status) + ": " +
                       res->body.substr(0, 200);
          if (IsRetryableStatus(res->status)) return std::nullopt;
          throw TransportError("POST " + full_path + " rejected: " + last_error,
                               1);
        }
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
          last_error = std::string("malformed JSON response: ") + e.what();
          return std::nullopt;
        }
      });
}

OpenAiGenerationClient::OpenAiGenerationClient(EndpointConfig config)
    : endpoint_(std::move(config)) {}

std::string OpenAiGenerationClient::Complete(const std::string& prompt,
                                             double temperature) {
  nlohmann::json body = {
      {"model", endpoint_.config().model},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
      {"temperature", temperature},
  };
  nlohmann::json res = endpoint_.Post("/chat/completions", body);
  try {
    const auto& content = res.at("choices").at(0).at("message").at("content");
    if (content.is_null()) return std::string();
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw GenerationError(std::string("unexpected completion payload: ") +
                          e.what());
  }
}

OpenAiEmbeddingClient::OpenAiEmbeddingClient(EndpointConfig config,
                                             std::size_t batch_size)
    : endpoint_(std::move(config)), batch_size_(std::max<std::size_t>(batch_size, 1)) {}

std::vector<Vector> OpenAiEmbeddingClient::Embed(
    const std::vector<std::string>& texts) {
  std::vector<Vector> out(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += batch_size_) {
    const std::size_t end = std::min(texts.size(), begin + batch_size_);
    std::vector<std::size_t> batch_indices;
    for (std::size_t i = begin; i < end; ++i) batch_indices.push_back(i);
    nlohmann::json body = {
        {"model", endpoint_.config().model},
        {"input", std::vector<std::string>(texts.begin() + begin,
                                           texts.begin() + end)},
    };
    try {
      nlohmann::json res = endpoint_.Post("/embeddings", body);
      const auto& data = res.at("data");
      if (data.size() != end - begin) {
        throw EmbeddingError("embedding count mismatch", batch_indices);
      }
      for (const auto& item : data) {
        std::size_t idx = item.value("index", std::size_t{0});
        if (idx >= end - begin) {
          throw EmbeddingError("embedding index out of range", batch_indices);
        }
        out[begin + idx] = item.at("embedding").get<Vector>();
      }
    } catch (const TransportError& e) {
      throw EmbeddingError(e.what(), batch_indices, /*transport=*/true);
    } catch (const nlohmann::json::exception& e) {
      throw EmbeddingError(std::string("unexpected embedding payload: ") +
                               e.what(),
                           batch_indices);
    }
  }
  return out;
}

HttpRewriterClient::HttpRewriterClient(EndpointConfig config)
    : endpoint_(std::move(config)) {}

std::string HttpRewriterClient::Rewrite(const std::string& text,
                                        double epsilon) {
  nlohmann::json res =
      endpoint_.Post("", {{"text", text}, {"epsilon", epsilon}});
  if (!res.contains("text") || !res["text"].is_string()) {
    throw GenerationError("rewriter response lacks a text field");
  }
  return res["text"].get<std::string>();
}

HttpNllScorer::HttpNllScorer(EndpointConfig config)
    : endpoint_(std::move(config)) {}

NllResult HttpNllScorer::Score(const std::string& text) {
  nlohmann::json res = endpoint_.Post("", {{"text", text}});
  try {
    return NllResult{res.at("mean_nll").get<double>(),
                     res.at("token_count").get<long>()};
  } catch (const nlohmann::json::exception& e) {
    throw GenerationError(std::string("unexpected scorer payload: ") +
                          e.what());
  }
}

std::optional<EndpointConfig> EndpointFromEnvironment(
    const std::string& url_var, const std::string& model_var,
    const std::string& default_model) {
  const char* url = std::getenv(url_var.c_str());
  if (url == nullptr || *url == '\0') return std::nullopt;
  EndpointConfig config;
  config.base_url = url;
  const char* model = std::getenv(model_var.c_str());
  config.model = (model != nullptr && *model != '\0') ? model : default_model;
  if (const char* key = std::getenv("ANONRAG_API_KEY")) config.api_key = key;
  return config;
}

}  // namespace anonrag
