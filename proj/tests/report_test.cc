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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "anonrag/errors.h"
#include "anonrag/report.h"

namespace anonrag {
namespace {

std::vector<ScoreRecord> RandomScores(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  auto grid = FullGrid();
  grid.push_back(VariantTag::Original());
  std::vector<ScoreRecord> out;
  for (const char* dataset : {"bbc", "enron"}) {
    for (const auto& tag : grid) {
      for (Placement p : {Placement::kPre, Placement::kPost}) {
        for (int doc = 0; doc < 4; ++doc) {
          for (TaskKind task : kAllTasks) {
            ScoreRecord s;
            s.run_id = "r";
            s.dataset = dataset;
            s.doc_id = "d" + std::to_string(doc);
            s.variant = tag;
            s.task = task;
            s.placement = p;
            if (task == TaskKind::kSummarize) {
              s.utility.rouge_l = 0.9 * u(rng);
              s.utility.cosine = 0.9 * u(rng);
              s.utility.perplexity = 1 + 50 * u(rng);
            } else {
              JudgeReport j;
              j.at(JudgeCategory::kNames) = 100 * u(rng);
              ValidateReport(j);
              s.judge = j;
            }
            out.push_back(std::move(s));
          }
        }
      }
    }
  }
  return out;
}

TEST(ReportTest, OneRowPerDatasetAndMethodInGridOrder) {
  auto report = BuildReport(RandomScores(1));
  ASSERT_EQ(report.rows.size(), 24u);
  const auto grid = FullGrid();
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(report.rows[i].dataset, "bbc");
    EXPECT_EQ(report.rows[i].variant, grid[i]);
    EXPECT_EQ(report.rows[12 + i].variant, grid[i]);
    ASSERT_TRUE(report.rows[i].pre && report.rows[i].post);
    EXPECT_EQ(report.rows[i].pre->count, 8u);
  }
}

TEST(ReportTest, TradeOffComesFromTheMeans) {
  const auto scores = RandomScores(2);
  auto report = BuildReport(scores);
  for (const auto& row : report.rows) {
    for (Placement p : {Placement::kPre, Placement::kPost}) {
      double rl = 0, cs = 0, llmj = 0;
      int nu = 0, nj = 0;
      for (const auto& s : scores) {
        if (s.dataset != row.dataset || s.variant != row.variant ||
            s.placement != p) {
          continue;
        }
        if (s.utility.rouge_l) {
          rl += *s.utility.rouge_l;
          cs += *s.utility.cosine;
          ++nu;
        }
        if (s.judge) {
          llmj += s.judge->overall;
          ++nj;
        }
      }
      const double expected =
          ComputeTradeOff(rl / nu, cs / nu, llmj / nj).value;
      EXPECT_NEAR(*row.Value(ReportMetric::kTradeOff, p), expected, 1e-9);
      EXPECT_NEAR(*row.Value(ReportMetric::kRougeL, p), rl / nu, 1e-12);
    }
  }
}

TEST(ReportTest, BestMatchesBruteForce) {
  auto report = BuildReport(RandomScores(3));
  for (ReportMetric m : kReportMetrics) {
    for (Placement p : {Placement::kPre, Placement::kPost}) {
      for (const char* dataset : {"bbc", "enron"}) {
        std::optional<double> best;
        for (const auto& row : report.rows) {
          if (row.dataset != dataset) continue;
          const double v = *row.Value(m, p);
          if (!best || (HigherIsBetter(m) ? v > *best : v < *best)) best = v;
        }
        auto idx = report.Best(dataset, m, p);
        ASSERT_FALSE(idx.empty());
        for (std::size_t i : idx) {
          EXPECT_EQ(*report.rows[i].Value(m, p), *best);
          EXPECT_TRUE(report.IsBest(i, m, p));
        }
      }
    }
  }
}

TEST(ReportTest, CsvShape) {
  auto report = BuildReport(RandomScores(4));
  const std::string csv = ReportCsv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kReportCsvHeader);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 25u);
  EXPECT_NE(csv.find("\nbbc,dp_mlm,50,"), std::string::npos);
  EXPECT_NE(csv.find("\nenron,pii_delete,,"), std::string::npos);
}

TEST(ReportTest, InfiniteTradeOffWrittenAsInf) {
  std::vector<ScoreRecord> scores(2);
  for (auto& s : scores) {
    s.dataset = "tab";
    s.doc_id = "d";
    s.variant = VariantTag::Make(Method::kPiiLabel);
  }
  scores[0].utility.rouge_l = 1;
  scores[0].utility.cosine = 1;
  JudgeReport j;
  j.at(JudgeCategory::kNames) = 10;
  ValidateReport(j);
  scores[1].task = TaskKind::kDetectPii;
  scores[1].judge = j;
  auto report = BuildReport(scores);
  EXPECT_NE(ReportCsv(report).find(",inf,"), std::string::npos);
  auto json = ReportJson(report);
  EXPECT_EQ(json["rows"][0]["pre"]["to"], "inf");
  EXPECT_NE(ReportText(report).find("inf"), std::string::npos);
}

TEST(ReportTest, EmptyAndOriginalOnlyRejected) {
  EXPECT_THROW(BuildReport({}), ParameterError);
  ScoreRecord s;
  s.dataset = "bbc";
  s.utility.rouge_l = 1;
  EXPECT_THROW(BuildReport({s}), ParameterError);
}

}  // namespace
}  // namespace anonrag
