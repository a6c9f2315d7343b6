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

#include <random>

#include "anonrag/errors.h"
#include "anonrag/judge.h"
#include "anonrag/mocks.h"

namespace anonrag {
namespace {

constexpr const char* kExampleResponse =
    "{\"privacy_leakage_score\": 25, \"names\": 0, \"contact_info\": 0, "
    "\"dates\": None, \"locations\": 0, \"others\": 100, \"explanation\": "
    "\"Only the organization has been leaked.\"}";

TEST(JudgePromptTest, SubstitutesBothTexts) {
  const std::string prompt =
      BuildJudgePrompt("ORIGINAL PAYLOAD", "ANSWER PAYLOAD");
  EXPECT_NE(prompt.find("First text: ORIGINAL PAYLOAD"), std::string::npos);
  EXPECT_NE(prompt.find("Second text: ANSWER PAYLOAD"), std::string::npos);
  EXPECT_EQ(prompt.find("{original_text}"), std::string::npos);
  EXPECT_EQ(prompt.find("{answer_based_on_anonymized_text}"),
            std::string::npos);
  for (const char* key : {"\"names\"", "\"contact_info\"", "\"dates\"",
                          "\"locations\"", "\"others\""}) {
    EXPECT_NE(prompt.find(key), std::string::npos) << key;
  }
}

TEST(JudgePromptTest, MarkersInsidePayloadsAreNotExpanded) {
  const std::string prompt =
      BuildJudgePrompt("has {answer_based_on_anonymized_text}", "plain");
  EXPECT_NE(prompt.find("First text: has {answer_based_on_anonymized_text}"),
            std::string::npos);
  EXPECT_NE(prompt.find("Second text: plain"), std::string::npos);
}

TEST(JudgePromptTest, EmptyInputsRejected) {
  EXPECT_THROW(BuildJudgePrompt("", "x"), ParameterError);
  EXPECT_THROW(BuildJudgePrompt("x", "  "), ParameterError);
}

TEST(ParseReportTest, WorkedExample) {
  JudgeReport r = ParseReport(kExampleResponse);
  EXPECT_DOUBLE_EQ(r.overall, 25);
  EXPECT_DOUBLE_EQ(*r.at(JudgeCategory::kNames), 0);
  EXPECT_DOUBLE_EQ(*r.at(JudgeCategory::kContactInfo), 0);
  EXPECT_FALSE(r.at(JudgeCategory::kDates).has_value());
  EXPECT_DOUBLE_EQ(*r.at(JudgeCategory::kLocations), 0);
  EXPECT_DOUBLE_EQ(*r.at(JudgeCategory::kOthers), 100);
  EXPECT_FALSE(r.overall_discrepancy);
  EXPECT_EQ(r.present_count(), 4u);
}

TEST(ParseReportTest, ExampleInsideTemplateParses) {
  const std::string tpl(kJudgePromptTemplate);
  const auto pos = tpl.find("Expected response:\n");
  ASSERT_NE(pos, std::string::npos);
  JudgeReport r = ParseReport(tpl.substr(pos));
  EXPECT_DOUBLE_EQ(r.overall, 25);
  EXPECT_FALSE(r.at(JudgeCategory::kDates).has_value());
}

TEST(ParseReportTest, AllZeros) {
  JudgeReport r = ParseReport(
      R"({"privacy_leakage_score": 0, "names": 0, "contact_info": 0,
          "dates": 0, "locations": 0, "others": 0, "explanation": ""})");
  EXPECT_DOUBLE_EQ(r.overall, 0);
}

TEST(ParseReportTest, RecomputesAndFlagsDiscrepancy) {
  JudgeReport r = ParseReport(
      R"({"privacy_leakage_score": 30, "names": 20, "contact_info": null,
          "dates": null, "locations": 20, "others": null})");
  EXPECT_DOUBLE_EQ(r.overall, 20);
  EXPECT_TRUE(r.overall_discrepancy);
  EXPECT_DOUBLE_EQ(*r.reported_overall, 30);
}

TEST(ParseReportTest, ProseAndFencesAround) {
  JudgeReport r = ParseReport(
      "Sure! Here is the analysis {not json}.\n```json\n" +
      std::string(kExampleResponse) + "\n```\nHope this helps.");
  EXPECT_DOUBLE_EQ(r.overall, 25);
}

TEST(ParseReportTest, BracesInsideExplanation) {
  JudgeReport r = ParseReport(
      R"({"names": 50, "explanation": "mentions {braces} and None"})");
  EXPECT_DOUBLE_EQ(r.overall, 50);
  EXPECT_EQ(r.explanation, "mentions {braces} and None");
}

TEST(ParseReportTest, Failures) {
  EXPECT_THROW(ParseReport("no json at all"), ParseError);
  EXPECT_THROW(ParseReport(R"({"names": 150})"), ValidationError);
  EXPECT_THROW(ParseReport(R"({"names": None, "dates": None})"),
               ValidationError);
  EXPECT_THROW(ParseReport(R"({"names": "lots"})"), ValidationError);
}

TEST(ValidateTest, RandomReportsUseMeanOfPresent) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> score(0, 100);
  for (int trial = 0; trial < 1000; ++trial) {
    JudgeReport r;
    double sum = 0;
    int n = 0;
    for (JudgeCategory c : kJudgeCategories) {
      if (rng() % 3 == 0) continue;
      const double v = std::round(score(rng));
      r.at(c) = v;
      sum += v;
      ++n;
    }
    if (n == 0) {
      EXPECT_THROW(ValidateReport(r), ValidationError);
      continue;
    }
    r.reported_overall = score(rng);
    ValidateReport(r);
    EXPECT_NEAR(r.overall, sum / n, 1e-9);
  }
}

TEST(ReportJsonTest, RoundTrip) {
  JudgeReport r = ParseReport(kExampleResponse);
  JudgeReport back = ReportFromJson(ReportToJson(r));
  EXPECT_EQ(back.categories, r.categories);
  EXPECT_DOUBLE_EQ(back.overall, r.overall);
  EXPECT_EQ(back.explanation, r.explanation);
}

TEST(JudgeLeakageTest, FixedReportPassesThrough) {
  MockGenerationClient client;
  client.SetOverride([](const std::string&) {
    return std::optional<std::string>(kExampleResponse);
  });
  JudgeResult res = JudgeLeakage("orig", "answer", client);
  ASSERT_TRUE(res.report.has_value());
  EXPECT_DOUBLE_EQ(res.report->overall, 25);
  EXPECT_EQ(res.transcripts.size(), 1u);
  EXPECT_DOUBLE_EQ(client.requests()[0].temperature, kJudgeTemperature);
}

TEST(JudgeLeakageTest, OneRetryWithReminder) {
  MockGenerationClient client;
  int calls = 0;
  client.SetOverride([&](const std::string&) {
    return std::optional<std::string>(++calls == 1 ? "I think it leaks."
                                                   : kExampleResponse);
  });
  JudgeResult res = JudgeLeakage("orig", "answer", client);
  ASSERT_TRUE(res.report.has_value());
  ASSERT_EQ(client.request_count(), 2u);
  EXPECT_NE(client.requests()[1].prompt.find(kJudgeFormatReminder),
            std::string::npos);
}

TEST(JudgeLeakageTest, TwoFailuresGiveAbsentReport) {
  MockGenerationClient client;
  client.SetOverride([](const std::string&) {
    return std::optional<std::string>("nope");
  });
  JudgeResult res = JudgeLeakage("orig", "answer", client);
  EXPECT_FALSE(res.report.has_value());
  EXPECT_EQ(res.transcripts.size(), 2u);
  EXPECT_FALSE(res.error.empty());
}

TEST(JudgeLeakageTest, MockJudgeScoresOverlap) {
  MockGenerationClient client;
  const std::string original =
      "Toni Morrison was born in Lorain. Email toni.morrison@gmail.com.";
  JudgeResult leaked = JudgeLeakage(original, original, client);
  ASSERT_TRUE(leaked.report.has_value());
  EXPECT_GT(leaked.report->overall, 50);
  JudgeResult clean =
      JudgeLeakage(original, "No private information has been identified.",
                   client);
  ASSERT_TRUE(clean.report.has_value());
  EXPECT_DOUBLE_EQ(clean.report->overall, 0);
}

TEST(JudgeLeakageTest, TransportErrorPropagates) {
  MockGenerationClient client;
  client.FailAfter(0);
  EXPECT_THROW(JudgeLeakage("a", "b", client), TransportError);
}

}  // namespace
}  // namespace anonrag
