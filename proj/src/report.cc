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

#include "anonrag/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "anonrag/errors.h"
#include "anonrag/text_util.h"

namespace anonrag {

namespace {

// Position of a tag in the grid, unknown epsilons after known ones.
std::pair<int, double> GridOrder(const VariantTag& tag) {
  return {static_cast<int>(tag.method), tag.epsilon.value_or(0)};
}

std::string Cell(const std::optional<double>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return "inf";
  return FormatNumber(*v);
}

std::string Fixed(const std::optional<double>& v) {
  if (!v) return "-";
  if (std::isinf(*v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

nlohmann::json JsonValue(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string_view ReportMetricName(ReportMetric metric) {
  switch (metric) {
    case ReportMetric::kRougeL:
      return "rl";
    case ReportMetric::kCosine:
      return "cs";
    case ReportMetric::kPerplexity:
      return "ppl";
    case ReportMetric::kLlmJudge:
      return "llmj";
    case ReportMetric::kTradeOff:
      return "to";
  }
  return "";
}

bool HigherIsBetter(ReportMetric metric) {
  return metric == ReportMetric::kRougeL || metric == ReportMetric::kCosine ||
         metric == ReportMetric::kTradeOff;
}

std::optional<double> ReportRow::Value(ReportMetric metric,
                                       Placement p) const {
  const auto& cell = at(p);
  if (!cell) return std::nullopt;
  switch (metric) {
    case ReportMetric::kRougeL:
      return cell->rouge_l;
    case ReportMetric::kCosine:
      return cell->cosine;
    case ReportMetric::kPerplexity:
      return cell->perplexity;
    case ReportMetric::kLlmJudge:
      return cell->llmj;
    case ReportMetric::kTradeOff:
      if (!cell->tradeoff) return std::nullopt;
      return cell->tradeoff->value;
  }
  return std::nullopt;
}

std::vector<std::size_t> Report::Best(const std::string& dataset,
                                      ReportMetric metric, Placement p) const {
  std::optional<double> best;
  std::vector<std::size_t> out;
  const bool higher = HigherIsBetter(metric);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].dataset != dataset) continue;
    auto v = rows[i].Value(metric, p);
    if (!v) continue;
    if (!best || (higher ? *v > *best : *v < *best)) {
      best = v;
      out = {i};
    } else if (*v == *best) {
      out.push_back(i);
    }
  }
  return out;
}

bool Report::IsBest(std::size_t row, ReportMetric metric, Placement p) const {
  auto best = Best(rows[row].dataset, metric, p);
  return std::find(best.begin(), best.end(), row) != best.end();
}

Report BuildReport(const std::vector<ScoreRecord>& scores) {
  std::vector<MetricSample> samples;
  std::map<std::string, VariantTag> tags;
  for (const auto& s : scores) {
    if (s.variant.is_original()) continue;
    MetricSample m;
    m.dataset = s.dataset;
    m.method = s.variant.ToString();
    m.epsilon = s.variant.epsilon;
    m.placement = std::string(PlacementName(s.placement));
    m.rouge_l = s.utility.rouge_l;
    m.cosine = s.utility.cosine;
    m.perplexity = s.utility.perplexity;
    if (s.judge) m.llmj = s.judge->overall;
    tags.emplace(m.method, s.variant);
    samples.push_back(std::move(m));
  }
  if (samples.empty()) throw ParameterError("empty report");

  std::map<std::pair<std::string, std::string>, ReportRow> by_key;
  for (auto& agg : Aggregate(samples)) {
    ReportRow& row = by_key[{agg.dataset, agg.method}];
    row.dataset = agg.dataset;
    row.variant = tags.at(agg.method);
    (agg.placement == "pre" ? row.pre : row.post) = std::move(agg);
  }
  Report report;
  for (auto& [key, row] : by_key) report.rows.push_back(std::move(row));
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     if (a.dataset != b.dataset) return a.dataset < b.dataset;
                     return GridOrder(a.variant) < GridOrder(b.variant);
                   });
  return report;
}

std::string ReportCsv(const Report& report) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& row : report.rows) {
    out += row.dataset + "," + std::string(MethodName(row.variant.method)) +
           "," + Cell(row.variant.epsilon);
    for (ReportMetric m : kReportMetrics) {
      out += "," + Cell(row.Value(m, Placement::kPre));
      out += "," + Cell(row.Value(m, Placement::kPost));
    }
    out += "," + std::to_string(row.pre ? row.pre->count : 0);
    out += "," + std::to_string(row.post ? row.post->count : 0);
    out += "\n";
  }
  return out;
}

nlohmann::json ReportJson(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ReportRow& row = report.rows[i];
    nlohmann::json j = {{"dataset", row.dataset},
                        {"variant", row.variant.ToString()},
                        {"method", MethodName(row.variant.method)},
                        {"epsilon", JsonValue(row.variant.epsilon)}};
    for (Placement p : {Placement::kPre, Placement::kPost}) {
      nlohmann::json cell = {
          {"count", row.at(p) ? row.at(p)->count : 0}};
      nlohmann::json best = nlohmann::json::array();
      for (ReportMetric m : kReportMetrics) {
        cell[std::string(ReportMetricName(m))] = JsonValue(row.Value(m, p));
        if (report.IsBest(i, m, p)) best.push_back(ReportMetricName(m));
      }
      cell["best"] = best;
      j[std::string(PlacementName(p))] = cell;
    }
    rows.push_back(std::move(j));
  }
  return {{"columns", {"rl", "cs", "ppl", "llmj", "to"}}, {"rows", rows}};
}

std::string ReportText(const Report& report) {
  const std::size_t name_w = 22;
  const std::size_t cell_w = 9;
  std::string out;
  std::string current;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ReportRow& row = report.rows[i];
    if (i == 0 || row.dataset != current) {
      current = row.dataset;
      if (i > 0) out += "\n";
      out += "dataset: " + (current.empty() ? std::string("-") : current) +
             "\n";
      std::string header = std::string(name_w, ' ');
      for (Placement p : {Placement::kPre, Placement::kPost}) {
        for (ReportMetric m : kReportMetrics) {
          std::string label = std::string(ReportMetricName(m)) + "_" +
                              std::string(PlacementName(p));
          header += Pad(label, cell_w + 1);
        }
      }
      out += header + "\n";
    }
    std::string line = row.variant.ToString();
    line.resize(std::max(line.size(), name_w), ' ');
    for (Placement p : {Placement::kPre, Placement::kPost}) {
      for (ReportMetric m : kReportMetrics) {
        std::string cell = Fixed(row.Value(m, p));
        cell += report.IsBest(i, m, p) ? "*" : " ";
        line += Pad(cell, cell_w + 1);
      }
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace anonrag
