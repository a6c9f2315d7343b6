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

#ifndef ANONRAG_RECORDS_H_
#define ANONRAG_RECORDS_H_

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "anonrag/judge.h"
#include "anonrag/metrics.h"
#include "anonrag/rag.h"
#include "json.hpp"

namespace anonrag {

enum class Placement { kPre, kPost };

std::string_view PlacementName(Placement placement);  // "pre" / "post"
std::optional<Placement> ParsePlacement(std::string_view name);

// One retrieved chunk that went into a generation request.
struct ContextRef {
  std::string doc_id;
  VariantTag variant;
  std::size_t chunk_index = 0;

  bool operator==(const ContextRef&) const = default;
};

struct AnswerRecord {
  std::string run_id;
  std::string doc_id;
  VariantTag variant;
  TaskKind task = TaskKind::kSummarize;
  Placement placement = Placement::kPre;
  std::string answer_text;
  long long timing_ms = 0;
  // PRE: the anonymized document. POST: the answer before anonymization.
  std::string source_text;
  std::vector<ContextRef> context;
  std::optional<std::string> skipped_reason;

  std::tuple<std::string, std::string, int> SortKey() const {
    return {doc_id, variant.ToString(), static_cast<int>(task)};
  }
};

struct ScoreRecord {
  std::string run_id;
  std::string dataset;
  std::string doc_id;
  VariantTag variant;
  TaskKind task = TaskKind::kSummarize;
  Placement placement = Placement::kPre;
  UtilityScores utility;
  std::optional<JudgeReport> judge;
  std::optional<TradeOff> tradeoff;
  std::optional<std::string> skipped_reason;
};

nlohmann::json ToJson(const AnswerRecord& r);
AnswerRecord AnswerFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const ScoreRecord& r);
ScoreRecord ScoreFromJson(const nlohmann::json& j);
// Infinity is written as the string "inf".
nlohmann::json ToJson(const TradeOff& t);
TradeOff TradeOffFromJson(const nlohmann::json& j);

// Line-delimited JSON with a schema header line:
//   {"schema":"anonrag.<kind>","version":1}
inline constexpr int kRecordSchemaVersion = 1;

struct LoadedLines {
  std::vector<nlohmann::json> records;
  // Bytes after the last complete record, when the file ends mid-record.
  std::optional<std::string> remainder;
  std::size_t complete_bytes = 0;  // header + complete record lines
};

// Throws StoreError (with a 1-based line number) on a bad header or a
// corrupt line other than an unterminated last one.
LoadedLines LoadRecordLines(const std::string& path, std::string_view kind);

// Appends records, one flushed line each. Opening an existing file checks
// the header and drops any incomplete tail so writing resumes after the
// last complete record.
class RecordWriter {
 public:
  RecordWriter(const std::string& path, std::string_view kind);
  void Append(const nlohmann::json& record);
  std::size_t existing() const { return existing_.size(); }
  const std::vector<nlohmann::json>& existing_records() const {
    return existing_;
  }

 private:
  std::ofstream out_;
  std::vector<nlohmann::json> existing_;
};

void SaveAnswers(const std::vector<AnswerRecord>& records,
                 const std::string& path);
std::vector<AnswerRecord> LoadAnswers(const std::string& path,
                                      std::optional<std::string>* remainder =
                                          nullptr);
void SaveScores(const std::vector<ScoreRecord>& records,
                const std::string& path);
std::vector<ScoreRecord> LoadScores(const std::string& path);

}  // namespace anonrag

#endif  // ANONRAG_RECORDS_H_
