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

#include "anonrag/rag.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <utility>

#include "anonrag/dp.h"
#include "anonrag/errors.h"
#include "anonrag/text_util.h"
#include "json.hpp"

namespace anonrag {

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kOriginal:
      return "original";
    case Method::kPiiDelete:
      return "pii_delete";
    case Method::kPiiLabel:
      return "pii_label";
    case Method::kPiiSynthetic:
      return "pii_synthetic";
    case Method::kDiffractor:
      return "diffractor";
    case Method::kDpPrompt:
      return "dp_prompt";
    case Method::kDpMlm:
      return "dp_mlm";
  }
  return "original";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (Method m : {Method::kOriginal, Method::kPiiDelete, Method::kPiiLabel,
                   Method::kPiiSynthetic, Method::kDiffractor,
                   Method::kDpPrompt, Method::kDpMlm}) {
    if (MethodName(m) == name) return m;
  }
  return std::nullopt;
}

bool IsDpMethod(Method method) {
  return method == Method::kDiffractor || method == Method::kDpPrompt ||
         method == Method::kDpMlm;
}

VariantTag VariantTag::Make(Method method, std::optional<double> epsilon) {
  if (IsDpMethod(method) != epsilon.has_value()) {
    throw ParameterError(std::string(MethodName(method)) +
                         (epsilon ? " takes no epsilon" : " needs an epsilon"));
  }
  if (epsilon && !(*epsilon > 0 && std::isfinite(*epsilon))) {
    throw ParameterError("epsilon must be positive");
  }
  return VariantTag{method, epsilon};
}

VariantTag VariantTag::Parse(std::string_view canonical) {
  const auto at = canonical.find('@');
  const std::string_view name = canonical.substr(0, at);
  auto method = ParseMethod(name);
  if (!method) {
    throw ParameterError("unknown method '" + std::string(name) + "'");
  }
  std::optional<double> epsilon;
  if (at != std::string_view::npos) {
    epsilon = ParseNumber(canonical.substr(at + 1));
    if (!epsilon) {
      throw ParameterError("bad epsilon in '" + std::string(canonical) + "'");
    }
  }
  VariantTag tag = Make(*method, epsilon);
  if (tag.ToString() != canonical) {
    throw ParameterError("non-canonical variant tag '" +
                         std::string(canonical) + "', expected '" +
                         tag.ToString() + "'");
  }
  return tag;
}

std::string VariantTag::ToString() const {
  std::string out(MethodName(method));
  if (epsilon) out += "@" + FormatNumber(*epsilon);
  return out;
}

std::strong_ordering VariantTag::operator<=>(const VariantTag& other) const {
  return ToString() <=> other.ToString();
}

std::vector<VariantTag> FullGrid() {
  std::vector<VariantTag> grid = {VariantTag::Make(Method::kPiiDelete),
                                  VariantTag::Make(Method::kPiiLabel),
                                  VariantTag::Make(Method::kPiiSynthetic)};
  for (double e : kDiffractorEpsilons) {
    grid.push_back(VariantTag::Make(Method::kDiffractor, e));
  }
  for (double e : kDpPromptEpsilons) {
    grid.push_back(VariantTag::Make(Method::kDpPrompt, e));
  }
  for (double e : kDpMlmEpsilons) {
    grid.push_back(VariantTag::Make(Method::kDpMlm, e));
  }
  return grid;
}

std::string_view TaskName(TaskKind task) {
  return task == TaskKind::kSummarize ? "summarize" : "detect_pii";
}

std::optional<TaskKind> ParseTask(std::string_view name) {
  if (name == "summarize") return TaskKind::kSummarize;
  if (name == "detect_pii") return TaskKind::kDetectPii;
  return std::nullopt;
}

const std::string_view kSummarizePrompt =
    "Your task is to generate a concise and factual summary of the provided "
    "text. The summary must be structured into the following three key "
    "attributes:\n"
    "\n"
    "[Attribute 1: TOPIC/CENTRAL IDEA:] Main topic or central idea of the "
    "text.\n"
    "[Attribute 2: MAIN DETAILS ABOUT TOPIC/CENTRAL IDEA:] Key events, "
    "discussion points, or details that support the central idea.\n"
    "[Attribute 3: IMPORTANT FACTS/EVENTS:] Critical facts, events, data, or "
    "viewpoints that are essential to understanding the text.\n"
    "\n"
    "Instructions:\n"
    "- Ensure the summary is concise and written in clear, simple language.\n"
    "- Maintain a factual and unbiased tone.\n"
    "- Follow the exact format for the three attributes as specified.\n"
    "- Present the information in a logical order that comprehensively covers "
    "the provided text.";

const std::string_view kDetectPiiPrompt =
    "Analyze the following text for any private or sensitive information, "
    "like personally identifiable information (PII). For the purpose of this "
    "analysis, private information includes \xE2\x80\x94 but is not limited "
    "to \xE2\x80\x94 names, email addresses, phone numbers, physical "
    "addresses, dates, locations, organizations, or any other details that "
    "could be used to identify an individual or entity.";

const std::string_view kSummaryHeaders[3] = {
    "Attribute 1: TOPIC/CENTRAL IDEA",
    "Attribute 2: MAIN DETAILS ABOUT TOPIC/CENTRAL IDEA",
    "Attribute 3: IMPORTANT FACTS/EVENTS",
};

std::string_view TaskPrompt(TaskKind task) {
  return task == TaskKind::kSummarize ? kSummarizePrompt : kDetectPiiPrompt;
}

std::string_view RetrievalQueryText(TaskKind task) { return TaskPrompt(task); }

std::vector<Vector> Embed(const std::vector<std::string>& texts,
                          EmbeddingClient& client) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw ParameterError("cannot embed empty text at index " +
                           std::to_string(i));
    }
  }
  if (texts.empty()) return {};
  std::vector<Vector> vectors = client.Embed(texts);
  if (vectors.size() != texts.size()) {
    std::vector<std::size_t> all(texts.size());
    std::iota(all.begin(), all.end(), 0);
    throw EmbeddingError("embedding client returned " +
                             std::to_string(vectors.size()) + " vectors for " +
                             std::to_string(texts.size()) + " texts",
                         all);
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    double norm = std::sqrt(std::inner_product(
        vectors[i].begin(), vectors[i].end(), vectors[i].begin(), 0.0));
    if (!(norm > 0) || !std::isfinite(norm)) {
      throw EmbeddingError("zero or non-finite embedding", {i});
    }
    for (double& x : vectors[i]) x /= norm;
  }
  return vectors;
}

void VectorIndex::Upsert(std::vector<IndexEntry> entries) {
  std::unique_lock lock(mu_);
  std::size_t dim = dimension_;
  for (const auto& e : entries) {
    const std::string key = e.doc_id + "/" + e.variant.ToString() + "/" +
                            std::to_string(e.chunk_index);
    double norm = std::sqrt(std::inner_product(
        e.vector.begin(), e.vector.end(), e.vector.begin(), 0.0));
    if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
      throw ParameterError("entry " + key + " rejected: norm " +
                           FormatNumber(norm) + " is not 1");
    }
    if (dim == 0) dim = e.vector.size();
    if (e.vector.size() != dim) {
      throw ParameterError("entry " + key + " rejected: dimension " +
                           std::to_string(e.vector.size()) + " != " +
                           std::to_string(dim));
    }
  }
  dimension_ = dim;
  for (auto& e : entries) {
    auto& chunks = docs_[e.doc_id][e.variant.ToString()];
    const std::size_t idx = e.chunk_index;
    if (chunks.insert_or_assign(idx, std::move(e)).second) ++size_;
  }
}

std::vector<ScoredEntry> VectorIndex::Query(const Vector& qvec,
                                            std::string_view doc_id,
                                            const VariantTag& variant,
                                            std::size_t k) const {
  if (k == 0) throw ParameterError("k must be at least 1");
  std::shared_lock lock(mu_);
  auto doc = docs_.find(doc_id);
  if (doc == docs_.end()) {
    throw EmptyResultError("unknown document '" + std::string(doc_id) + "'",
                           EmptyResultError::Reason::kDocUnknown);
  }
  auto var = doc->second.find(variant.ToString());
  if (var == doc->second.end() || var->second.empty()) {
    throw EmptyResultError("document '" + std::string(doc_id) +
                               "' has no variant " + variant.ToString(),
                           EmptyResultError::Reason::kVariantMissing);
  }
  if (qvec.size() != dimension_) {
    throw ParameterError("query dimension " + std::to_string(qvec.size()) +
                         " != index dimension " + std::to_string(dimension_));
  }
  std::vector<ScoredEntry> scored;
  scored.reserve(var->second.size());
  for (const auto& [idx, entry] : var->second) {
    double dot = std::inner_product(qvec.begin(), qvec.end(),
                                    entry.vector.begin(), 0.0);
    scored.push_back({entry, dot});
  }
  // Ties keep chunk order.
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredEntry& a, const ScoredEntry& b) {
                     return a.score > b.score;
                   });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::optional<IndexEntry> VectorIndex::Get(std::string_view doc_id,
                                           const VariantTag& variant,
                                           std::size_t chunk_index) const {
  std::shared_lock lock(mu_);
  auto doc = docs_.find(doc_id);
  if (doc == docs_.end()) return std::nullopt;
  auto var = doc->second.find(variant.ToString());
  if (var == doc->second.end()) return std::nullopt;
  auto it = var->second.find(chunk_index);
  if (it == var->second.end()) return std::nullopt;
  return it->second;
}

std::size_t VectorIndex::size() const {
  std::shared_lock lock(mu_);
  return size_;
}

std::size_t VectorIndex::dimension() const {
  std::shared_lock lock(mu_);
  return dimension_;
}

void VectorIndex::Save(const std::string& path) const {
  std::shared_lock lock(mu_);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [doc_id, variants] : docs_) {
    for (const auto& [tag, chunks] : variants) {
      for (const auto& [idx, e] : chunks) {
        entries.push_back({{"doc_id", doc_id},
                           {"variant", tag},
                           {"chunk_index", idx},
                           {"text", e.text},
                           {"vector", e.vector}});
      }
    }
  }
  nlohmann::json snapshot = {{"format", "anonrag.index"},
                             {"version", 1},
                             {"dimension", dimension_},
                             {"entries", entries}};
  WriteFile(path, snapshot.dump() + "\n");
}

VectorIndex::VectorIndex(VectorIndex&& other) noexcept {
  std::unique_lock lock(other.mu_);
  docs_ = std::move(other.docs_);
  size_ = std::exchange(other.size_, 0);
  dimension_ = std::exchange(other.dimension_, 0);
}

VectorIndex& VectorIndex::operator=(VectorIndex&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  docs_ = std::move(other.docs_);
  size_ = std::exchange(other.size_, 0);
  dimension_ = std::exchange(other.dimension_, 0);
  return *this;
}

VectorIndex VectorIndex::Load(const std::string& path) {
  nlohmann::json snapshot;
  try {
    snapshot = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed index snapshot " + path + ": " + e.what());
  }
  if (snapshot.value("format", "") != "anonrag.index" ||
      snapshot.value("version", 0) != 1) {
    throw ParameterError("unsupported index snapshot " + path);
  }
  std::vector<IndexEntry> entries;
  for (const auto& j : snapshot.at("entries")) {
    entries.push_back({j.at("vector").get<Vector>(),
                       j.at("doc_id").get<std::string>(),
                       VariantTag::Parse(j.at("variant").get<std::string>()),
                       j.at("chunk_index").get<std::size_t>(),
                       j.at("text").get<std::string>()});
  }
  VectorIndex index;
  index.Upsert(std::move(entries));
  return index;
}

std::string BuildAnswerPrompt(TaskKind task,
                              const std::vector<std::string>& chunks) {
  std::string prompt(TaskPrompt(task));
  prompt += "\n\nText:\n";
  for (const auto& c : chunks) prompt += c;
  return prompt;
}

std::string GenerateAnswer(TaskKind task,
                           const std::vector<std::string>& chunks,
                           GenerationClient& gen) {
  if (chunks.empty()) throw ParameterError("no context chunks to answer from");
  std::string raw = gen.Complete(BuildAnswerPrompt(task, chunks),
                                 kAnswerTemperature);
  std::string_view trimmed = Trim(raw);
  if (trimmed.empty()) {
    throw GenerationError(std::string(TaskName(task)) +
                          " answer came back empty");
  }
  return std::string(trimmed);
}

}  // namespace anonrag
