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

#ifndef ANONRAG_RAG_H_
#define ANONRAG_RAG_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "anonrag/clients.h"

namespace anonrag {

enum class Method {
  kOriginal,
  kPiiDelete,
  kPiiLabel,
  kPiiSynthetic,
  kDiffractor,
  kDpPrompt,
  kDpMlm,
};

std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);
bool IsDpMethod(Method method);

// (method, epsilon) with canonical string "method[@epsilon]". Epsilon is
// present exactly for the DP methods.
struct VariantTag {
  Method method = Method::kOriginal;
  std::optional<double> epsilon;

  static VariantTag Original() { return {}; }
  // Throws ParameterError when epsilon presence does not match the method.
  static VariantTag Make(Method method, std::optional<double> epsilon = {});
  static VariantTag Parse(std::string_view canonical);

  std::string ToString() const;
  bool is_original() const { return method == Method::kOriginal; }

  bool operator==(const VariantTag& other) const = default;
  // Orders by canonical string.
  std::strong_ordering operator<=>(const VariantTag& other) const;
};

// The 12 anonymized variants, in result-table order.
std::vector<VariantTag> FullGrid();

enum class TaskKind { kSummarize, kDetectPii };

inline constexpr TaskKind kAllTasks[] = {TaskKind::kSummarize,
                                         TaskKind::kDetectPii};

std::string_view TaskName(TaskKind task);
std::optional<TaskKind> ParseTask(std::string_view name);

extern const std::string_view kSummarizePrompt;
extern const std::string_view kDetectPiiPrompt;
std::string_view TaskPrompt(TaskKind task);

// The three section headers a summary is asked to contain.
extern const std::string_view kSummaryHeaders[3];

// Text embedded as the retrieval query of a task.
std::string_view RetrievalQueryText(TaskKind task);

// Embeds and L2-normalizes. Throws EmbeddingError on a count mismatch or a
// zero vector, ParameterError on empty input strings.
std::vector<Vector> Embed(const std::vector<std::string>& texts,
                          EmbeddingClient& client);

struct IndexEntry {
  Vector vector;  // unit norm
  std::string doc_id;
  VariantTag variant;
  std::size_t chunk_index = 0;
  std::string text;
};

struct ScoredEntry {
  IndexEntry entry;
  double score = 0;
};

// In-memory exact-scan vector index keyed by (doc_id, variant, chunk_index).
// Reads may run concurrently; writes are serialized.
class VectorIndex {
 public:
  static constexpr double kNormTolerance = 1e-6;

  VectorIndex() = default;
  VectorIndex(VectorIndex&& other) noexcept;
  VectorIndex& operator=(VectorIndex&& other) noexcept;

  // Replaces entries with the same key. Rejects the whole batch if any entry
  // is not unit norm or has a mismatched dimension.
  void Upsert(std::vector<IndexEntry> entries);

  // Top-k of the entries whose doc_id and variant equal the filter, by dot
  // product with qvec, ties by chunk_index. Throws EmptyResultError when the
  // filter matches nothing.
  std::vector<ScoredEntry> Query(const Vector& qvec, std::string_view doc_id,
                                 const VariantTag& variant,
                                 std::size_t k) const;

  std::optional<IndexEntry> Get(std::string_view doc_id,
                                const VariantTag& variant,
                                std::size_t chunk_index) const;
  std::size_t size() const;
  std::size_t dimension() const;

  void Save(const std::string& path) const;
  static VectorIndex Load(const std::string& path);

 private:
  using ChunkMap = std::map<std::size_t, IndexEntry>;
  using VariantMap = std::map<std::string, ChunkMap>;

  mutable std::shared_mutex mu_;
  std::map<std::string, VariantMap, std::less<>> docs_;
  std::size_t size_ = 0;
  std::size_t dimension_ = 0;
};

inline constexpr double kAnswerTemperature = 0.0;

// Task prompt followed by the chunk texts, in the given order.
std::string BuildAnswerPrompt(TaskKind task,
                              const std::vector<std::string>& chunks);

std::string GenerateAnswer(TaskKind task,
                           const std::vector<std::string>& chunks,
                           GenerationClient& gen);

}  // namespace anonrag

#endif  // ANONRAG_RAG_H_
