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

#include "anonrag/mocks.h"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "anonrag/dp.h"
#include "anonrag/errors.h"
#include "anonrag/judge.h"
#include "anonrag/metrics.h"
#include "anonrag/rag.h"
#include "anonrag/text_util.h"
#include "json.hpp"

namespace anonrag {

HashEmbeddingClient::HashEmbeddingClient(std::size_t dimension,
                                         std::uint64_t seed)
    : dimension_(std::max<std::size_t>(dimension, 1)), seed_(seed) {}

Vector HashEmbeddingClient::EmbedOne(const std::string& text) const {
  Vector v(dimension_, 0.0);
  auto add = [&](std::string_view key) {
    std::uint64_t state = Fnv1a64(key) ^ seed_;
    for (double& x : v) {
      x += static_cast<double>(SplitMix64(state) >> 11) * 0x1.0p-52 - 1.0;
    }
  };
  auto tokens = RougeTokenize(text);
  if (tokens.empty()) {
    add(text);
  } else {
    for (const auto& t : tokens) add(t);
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0) {
    v[0] = 1;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

std::vector<Vector> HashEmbeddingClient::Embed(
    const std::vector<std::string>& texts) {
  ++calls_;
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(EmbedOne(t));
  return out;
}

namespace {

constexpr std::string_view kContextMarker = "\n\nText:\n";

std::vector<std::string> SplitSentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      if (!Trim(current).empty()) sentences.emplace_back(Trim(current));
      current.clear();
      continue;
    }
    current.push_back(c);
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == text.size() || IsAsciiSpace(text[i + 1]))) {
      if (!Trim(current).empty()) sentences.emplace_back(Trim(current));
      current.clear();
    }
  }
  if (!Trim(current).empty()) sentences.emplace_back(Trim(current));
  return sentences;
}

JudgeCategory JudgeCategoryFor(EntityCategory c) {
  switch (c) {
    case EntityCategory::kPerson:
      return JudgeCategory::kNames;
    case EntityCategory::kEmailAddress:
    case EntityCategory::kPhoneNumber:
      return JudgeCategory::kContactInfo;
    case EntityCategory::kDateTime:
      return JudgeCategory::kDates;
    case EntityCategory::kLocation:
      return JudgeCategory::kLocations;
    case EntityCategory::kOrganization:
    case EntityCategory::kOther:
      return JudgeCategory::kOthers;
  }
  return JudgeCategory::kOthers;
}

std::string_view ListLabel(EntityCategory c) {
  switch (c) {
    case EntityCategory::kPerson:
      return "name";
    case EntityCategory::kLocation:
      return "location";
    case EntityCategory::kDateTime:
      return "date";
    case EntityCategory::kEmailAddress:
      return "email address";
    case EntityCategory::kPhoneNumber:
      return "phone number";
    case EntityCategory::kOrganization:
      return "organization";
    case EntityCategory::kOther:
      return "other";
  }
  return "other";
}

std::string_view FakeValue(std::string_view category) {
  static const std::map<std::string_view, std::string_view> kFakes = {
      {"PERSON", "Katherine Buckjov"},
      {"LOCATION", "Ukraine"},
      {"DATE_TIME", "March 3"},
      {"DATE", "March 3"},
      {"EMAIL_ADDRESS", "k.buckjov@example.org"},
      {"PHONE_NUMBER", "555-0142"},
      {"ORGANIZATION", "NASA"},
  };
  auto it = kFakes.find(category);
  return it == kFakes.end() ? std::string_view("Zephyr") : it->second;
}

}  // namespace

MockGenerationClient::MockGenerationClient(PiiDetector detector)
    : detector_(std::move(detector)) {}

std::string MockGenerationClient::Summarize(std::string_view context) {
  auto sentences = SplitSentences(context);
  if (sentences.empty()) sentences.emplace_back(Trim(context));
  auto join = [&](std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < std::min(to, sentences.size()); ++i) {
      if (!out.empty()) out += " ";
      out += sentences[i];
    }
    return out;
  };
  std::string details = join(1, 3);
  if (details.empty()) details = sentences.front();
  return "[" + std::string(kSummaryHeaders[0]) + "]: " + sentences.front() +
         "\n\n[" + std::string(kSummaryHeaders[1]) + "]: " + details +
         "\n\n[" + std::string(kSummaryHeaders[2]) + "]: " + sentences.back();
}

std::string MockGenerationClient::ListPii(std::string_view context) const {
  auto spans = detector_.Detect(context);
  if (spans.empty()) return "No private information has been identified.";
  std::string out = "The text contains the following private information:";
  std::set<std::pair<std::string_view, std::string>> seen;
  for (const auto& s : spans) {
    if (!seen.emplace(ListLabel(s.category), s.surface).second) continue;
    out += "\n- ";
    out += ListLabel(s.category);
    out += ": " + s.surface;
  }
  return out;
}

std::string MockGenerationClient::JudgeJson(std::string_view original,
                                            std::string_view second) const {
  std::map<JudgeCategory, std::set<std::string>> originals;
  for (const auto& s : detector_.Detect(original)) {
    originals[JudgeCategoryFor(s.category)].insert(ToLowerAscii(s.surface));
  }
  const std::string haystack = ToLowerAscii(second);
  nlohmann::json j;
  double sum = 0;
  int present = 0;
  std::string explanation;
  for (JudgeCategory c : kJudgeCategories) {
    auto it = originals.find(c);
    const std::string key(JudgeCategoryKey(c));
    if (it == originals.end()) {
      j[key] = nullptr;
      continue;
    }
    int leaked = 0;
    for (const auto& surface : it->second) {
      leaked += haystack.find(surface) != std::string::npos;
    }
    const double score =
        100.0 * leaked / static_cast<double>(it->second.size());
    j[key] = score;
    sum += score;
    ++present;
    explanation += key + ": " + std::to_string(leaked) + "/" +
                   std::to_string(it->second.size()) + " leaked. ";
  }
  if (present == 0) {
    j["others"] = 0;
    present = 1;
    explanation = "No private entities in the first text.";
  }
  j["privacy_leakage_score"] = sum / present;
  j["explanation"] = std::string(Trim(explanation));
  // Python-style None.
  std::string out = j.dump();
  ReplaceAll(out, "null", "None");
  return out;
}

std::string MockGenerationClient::FillPlaceholders(std::string_view labeled) {
  std::string out;
  std::size_t pos = 0;
  for (auto [start, end] : FindPlaceholders(labeled)) {
    out.append(labeled.substr(pos, start - pos));
    out.append(FakeValue(labeled.substr(start + 1, end - start - 2)));
    pos = end;
  }
  out.append(labeled.substr(pos));
  return out;
}

std::string MockGenerationClient::Complete(const std::string& prompt,
                                           double temperature) {
  std::function<std::optional<std::string>(const std::string&)> hook;
  {
    std::lock_guard lock(mu_);
    if (fail_after_ && log_.size() >= *fail_after_) {
      throw TransportError("mock endpoint unavailable", 1);
    }
    log_.push_back({prompt, temperature});
    hook = override_;
  }
  if (hook) {
    if (auto reply = hook(prompt)) return *reply;
  }
  std::string_view p = prompt;
  if (StartsWith(p, kSynthesisPromptTemplate.substr(0, 40))) {
    const auto input = p.rfind("\ninput: ");
    const auto output = p.rfind("\noutput:");
    std::string_view labeled = p.substr(input + 8, output - input - 8);
    return FillPlaceholders(labeled);
  }
  if (StartsWith(p, "Paraphrase the following document: ")) {
    return std::string(p.substr(35));
  }
  if (StartsWith(p, kJudgePromptTemplate.substr(0, 40))) {
    const auto first = p.find("First text: ");
    const auto second = p.find("\n\nSecond text: ", first);
    const auto example = p.rfind("\n\nExample:\n");
    std::string_view original = p.substr(first + 12, second - first - 12);
    std::string_view answer = p.substr(second + 15, example - second - 15);
    return JudgeJson(original, answer);
  }
  const auto ctx = p.find(kContextMarker);
  if (ctx != std::string_view::npos) {
    std::string_view context = p.substr(ctx + kContextMarker.size());
    if (StartsWith(p, kSummarizePrompt)) return Summarize(context);
    if (StartsWith(p, kDetectPiiPrompt)) return ListPii(context);
  }
  return std::string(Trim(p));
}

std::vector<MockGenerationClient::Request> MockGenerationClient::requests()
    const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t MockGenerationClient::request_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

void MockGenerationClient::FailAfter(std::size_t n) {
  std::lock_guard lock(mu_);
  fail_after_ = n;
}

void MockGenerationClient::SetOverride(
    std::function<std::optional<std::string>(const std::string&)> fn) {
  std::lock_guard lock(mu_);
  override_ = std::move(fn);
}

std::string MockRewriterClient::Rewrite(const std::string& text,
                                        double epsilon) {
  static const char* const kWords[] = {
      "the",    "report", "family", "city",    "travel", "meeting",
      "office", "week",   "plan",   "service", "letter", "people"};
  const double replace_p = 1.0 / (1.0 + epsilon / 25.0);
  std::istringstream in(text);
  std::string word;
  std::string out;
  std::size_t position = 0;
  while (in >> word) {
    std::uint64_t state = DeriveSeed(
        seed_, word + "#" + std::to_string(position++) + "#" +
                   FormatNumber(epsilon));
    const double u =
        static_cast<double>(SplitMix64(state) >> 11) * 0x1.0p-53;
    if (!out.empty()) out.push_back(' ');
    out += u < replace_p ? kWords[SplitMix64(state) % 12] : word;
  }
  return out;
}

MockEndpointServer::MockEndpointServer(MockGenerationClient& gen,
                                       HashEmbeddingClient& embed,
                                       RewriterClient& rewriter,
                                       NllScorer* scorer)
    : gen_(gen),
      embed_(embed),
      rewriter_(rewriter),
      scorer_(scorer),
      server_(std::make_unique<httplib::Server>()) {
  auto json_reply = [](httplib::Response& res, const nlohmann::json& j) {
    res.set_content(j.dump(), "application/json");
  };
  auto guard = [this](httplib::Response& res) {
    ++hits_;
    if (fail_next_ > 0) {
      --fail_next_;
      res.status = 503;
      res.set_content(R"({"error":"unavailable"})", "application/json");
      return true;
    }
    return false;
  };
  server_->Post("/v1/chat/completions", [=, this](const httplib::Request& req,
                                                  httplib::Response& res) {
    if (guard(res)) return;
    auto body = nlohmann::json::parse(req.body);
    std::string prompt = body.at("messages").back().at("content");
    std::string reply = gen_.Complete(prompt, body.value("temperature", 1.0));
    json_reply(res, {{"object", "chat.completion"},
                     {"model", body.value("model", "mock")},
                     {"choices",
                      {{{"index", 0},
                        {"message", {{"role", "assistant"}, {"content", reply}}},
                        {"finish_reason", "stop"}}}}});
  });
  server_->Post("/v1/embeddings", [=, this](const httplib::Request& req,
                                            httplib::Response& res) {
    if (guard(res)) return;
    auto body = nlohmann::json::parse(req.body);
    std::vector<std::string> input;
    if (body.at("input").is_string()) {
      input.push_back(body["input"]);
    } else {
      input = body["input"].get<std::vector<std::string>>();
    }
    auto vectors = embed_.Embed(input);
    nlohmann::json data = nlohmann::json::array();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      data.push_back(
          {{"object", "embedding"}, {"index", i}, {"embedding", vectors[i]}});
    }
    json_reply(res, {{"object", "list"}, {"data", data}});
  });
  server_->Post("/rewrite", [=, this](const httplib::Request& req,
                                      httplib::Response& res) {
    if (guard(res)) return;
    auto body = nlohmann::json::parse(req.body);
    json_reply(res, {{"text", rewriter_.Rewrite(body.at("text"),
                                                body.at("epsilon"))}});
  });
  server_->Post("/nll", [=, this](const httplib::Request& req,
                                  httplib::Response& res) {
    if (guard(res)) return;
    if (scorer_ == nullptr) {
      res.status = 404;
      return;
    }
    auto body = nlohmann::json::parse(req.body);
    NllResult r = scorer_->Score(body.at("text"));
    json_reply(res, {{"mean_nll", r.mean_nll}, {"token_count", r.token_count}});
  });
}

MockEndpointServer::~MockEndpointServer() { Stop(); }

int MockEndpointServer::Start(int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else if (server_->bind_to_port("127.0.0.1", port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw Error("mock endpoint server could not bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockEndpointServer::Stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

std::string MockEndpointServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

}  // namespace anonrag
