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

#ifndef ANONRAG_REPORT_H_
#define ANONRAG_REPORT_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "anonrag/metrics.h"
#include "anonrag/rag.h"
#include "anonrag/records.h"
#include "json.hpp"

namespace anonrag {

enum class ReportMetric { kRougeL, kCosine, kPerplexity, kLlmJudge, kTradeOff };

inline constexpr std::array<ReportMetric, 5> kReportMetrics = {
    ReportMetric::kRougeL, ReportMetric::kCosine, ReportMetric::kPerplexity,
    ReportMetric::kLlmJudge, ReportMetric::kTradeOff};

std::string_view ReportMetricName(ReportMetric metric);  // "rl", "cs", ...
bool HigherIsBetter(ReportMetric metric);

struct ReportRow {
  std::string dataset;
  VariantTag variant;
  std::optional<AggregateRow> pre;
  std::optional<AggregateRow> post;

  const std::optional<AggregateRow>& at(Placement p) const {
    return p == Placement::kPre ? pre : post;
  }
  std::optional<double> Value(ReportMetric metric, Placement p) const;
};

struct Report {
  // Grid order per dataset; the original variant is excluded.
  std::vector<ReportRow> rows;

  // Row indices holding the best value of a column within its dataset.
  std::vector<std::size_t> Best(const std::string& dataset,
                                ReportMetric metric, Placement p) const;
  bool IsBest(std::size_t row, ReportMetric metric, Placement p) const;
};

// Throws ParameterError("empty report") when no anonymized variant has
// scores.
Report BuildReport(const std::vector<ScoreRecord>& scores);

// Columns: dataset,method,epsilon, then {rl,cs,ppl,llmj,to}_{pre,post},
// then n_pre,n_post. Missing values are empty; infinite TO is "inf".
inline constexpr const char* kReportCsvHeader =
    "dataset,method,epsilon,rl_pre,rl_post,cs_pre,cs_post,ppl_pre,ppl_post,"
    "llmj_pre,llmj_post,to_pre,to_post,n_pre,n_post";

std::string ReportCsv(const Report& report);
nlohmann::json ReportJson(const Report& report);
// Fixed-width table; '*' marks the best value in each column.
std::string ReportText(const Report& report);

}  // namespace anonrag

#endif  // ANONRAG_REPORT_H_
