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

#ifndef ANONRAG_JUDGE_H_
#define ANONRAG_JUDGE_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anonrag/clients.h"
#include "json.hpp"

namespace anonrag {

enum class JudgeCategory { kNames, kContactInfo, kDates, kLocations, kOthers };

inline constexpr std::array<JudgeCategory, 5> kJudgeCategories = {
    JudgeCategory::kNames, JudgeCategory::kContactInfo, JudgeCategory::kDates,
    JudgeCategory::kLocations, JudgeCategory::kOthers};

// JSON key: "names", "contact_info", "dates", "locations", "others".
std::string_view JudgeCategoryKey(JudgeCategory category);

// Privacy leakage scores in [0, 100]. A category is absent when neither
// text has entities of that kind.
struct JudgeReport {
  double overall = 0;
  std::array<std::optional<double>, 5> categories;
  std::string explanation;
  // Overall as the model stated it, kept for audit.
  std::optional<double> reported_overall;
  bool overall_discrepancy = false;

  std::optional<double>& at(JudgeCategory c) {
    return categories[static_cast<std::size_t>(c)];
  }
  const std::optional<double>& at(JudgeCategory c) const {
    return categories[static_cast<std::size_t>(c)];
  }
  std::size_t present_count() const;
};

inline constexpr double kJudgeTemperature = 0.0;
// Reported overall may differ from the category mean by this much before it
// is flagged.
inline constexpr double kOverallTolerance = 0.5;

extern const std::string_view kJudgePromptTemplate;
extern const std::string_view kJudgeFormatReminder;

// Throws ParameterError when either text is empty.
std::string BuildJudgePrompt(std::string_view original,
                             std::string_view answer);

// Range-checks every score, requires one present category and replaces the
// overall with the mean of the present categories. Idempotent.
void ValidateReport(JudgeReport& report);

// Extracts the first JSON object from raw model output (code fences and
// surrounding prose allowed, Python None accepted) and validates it.
// Throws ParseError or ValidationError.
JudgeReport ParseReport(std::string_view raw);

nlohmann::json ReportToJson(const JudgeReport& report);
JudgeReport ReportFromJson(const nlohmann::json& j);

struct JudgeResult {
  std::optional<JudgeReport> report;  // absent when the judge never complied
  std::vector<std::string> transcripts;
  std::string error;
};

// Build, send, parse, validate. A malformed reply earns one retry with a
// format reminder; a second failure yields an absent report. Transport
// failures propagate.
JudgeResult JudgeLeakage(std::string_view original, std::string_view answer,
                         GenerationClient& client);

}  // namespace anonrag

#endif  // ANONRAG_JUDGE_H_
