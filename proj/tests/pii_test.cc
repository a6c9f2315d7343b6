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

#include "anonrag/errors.h"
#include "anonrag/mocks.h"
#include "anonrag/pii.h"

namespace anonrag {
namespace {

constexpr const char* kEnronSample =
    "Catherine, I have received the call and will be traveling to "
    "Kazakhstan next week to complete the adoption. My husband and son are "
    "staying back. I arrive in Almaty on the 14th late in the evening. I'll "
    "spend the day of the 15th in Almaty and then take the overnight train "
    "to Taraz. I expect to have a court date in Taraz on the 19th or 20th. "
    "Then I will be back in Almaty, probably over Christmas. Finally, I "
    "expect to travel to Moscow on around Dec 27 and then return to Houston "
    "around Dec 30. Thanks Shelley Corman shelley.corman@enron.com and";

PiiDetector EnronDetector() {
  Gazetteer g;
  g.Add(EntityCategory::kPerson, "Catherine");
  g.Add(EntityCategory::kPerson, "Shelley Corman");
  for (const char* loc : {"Kazakhstan", "Almaty", "Taraz", "Moscow",
                          "Houston"}) {
    g.Add(EntityCategory::kLocation, loc);
  }
  return PiiDetector(std::move(g));
}

TEST(DetectTest, Email) {
  const std::string text = "please email toni.morrison@gmail.com";
  auto spans = PiiDetector().Detect(text);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].category, EntityCategory::kEmailAddress);
  EXPECT_EQ(spans[0].surface, "toni.morrison@gmail.com");
  EXPECT_EQ(text.substr(spans[0].start, spans[0].end - spans[0].start),
            spans[0].surface);
}

TEST(DetectTest, EmptyText) { EXPECT_TRUE(PiiDetector().Detect("").empty()); }

TEST(DetectTest, GazetteerLocations) {
  Gazetteer g;
  g.Add(EntityCategory::kLocation, "Lorain");
  g.Add(EntityCategory::kLocation, "Ohio");
  auto spans = PiiDetector(std::move(g)).Detect("born and raised in Lorain, Ohio");
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].surface, "Lorain");
  EXPECT_EQ(spans[1].surface, "Ohio");
  for (const auto& s : spans) EXPECT_EQ(s.category, EntityCategory::kLocation);
}

TEST(DetectTest, GazetteerNeedsWordBoundary) {
  Gazetteer g;
  g.Add(EntityCategory::kLocation, "Ohio");
  EXPECT_TRUE(PiiDetector(std::move(g)).Detect("Ohioan voters").empty());
}

TEST(DetectTest, PatternsAndHeuristics) {
  const std::string text =
      "Dr. Jane Doe of Howard University called 713-853-6724 on 12 June 1998.";
  auto spans = PiiDetector().Detect(text);
  auto has = [&](EntityCategory c, const std::string& surface) {
    for (const auto& s : spans) {
      if (s.category == c && s.surface == surface) return true;
    }
    return false;
  };
  EXPECT_TRUE(has(EntityCategory::kPerson, "Jane Doe"));
  EXPECT_TRUE(has(EntityCategory::kOrganization, "Howard University"));
  EXPECT_TRUE(has(EntityCategory::kPhoneNumber, "713-853-6724"));
  EXPECT_TRUE(has(EntityCategory::kDateTime, "12 June 1998"));
}

TEST(DetectTest, SpansAreSortedDisjointAndValid) {
  const std::string text = kEnronSample;
  auto spans = EnronDetector().Detect(text);
  EXPECT_NO_THROW(ValidateSpans(text, spans));
  EXPECT_GE(spans.size(), 10u);
}

TEST(DeleteTest, DirectSplice) {
  std::vector<EntitySpan> spans = {
      {0, 7, EntityCategory::kPerson, "Shelley"}};
  EXPECT_EQ(DeleteEntities("Shelley arrives", spans), " arrives");
}

TEST(DeleteTest, NoSpansIsIdentity) {
  EXPECT_EQ(DeleteEntities("any text", {}), "any text");
}

TEST(DeleteTest, RejectsBadSpans) {
  std::vector<EntitySpan> wrong_surface = {
      {0, 7, EntityCategory::kPerson, "Shelly!"}};
  EXPECT_THROW(DeleteEntities("Shelley arrives", wrong_surface), SpanError);
  std::vector<EntitySpan> out_of_range = {
      {10, 30, EntityCategory::kPerson, "x"}};
  EXPECT_THROW(DeleteEntities("short", out_of_range), SpanError);
  std::vector<EntitySpan> overlapping = {
      {0, 4, EntityCategory::kPerson, "Shel"},
      {2, 7, EntityCategory::kPerson, "elley"}};
  EXPECT_THROW(DeleteEntities("Shelley arrives", overlapping), SpanError);
}

TEST(DeleteTest, EnronSampleLeavesBareGaps) {
  const std::string text = kEnronSample;
  const std::string out = DeleteEntities(text, EnronDetector().Detect(text));
  EXPECT_NE(out.find("I arrive in  on "), std::string::npos) << out;
  EXPECT_EQ(out.find("Almaty"), std::string::npos);
  EXPECT_EQ(out.find("enron.com"), std::string::npos);
  EXPECT_EQ(out.rfind(", I have received the call", 0), 0u) << out;
}

TEST(LabelTest, DirectSplice) {
  const std::string text = "Toni Morrison lives in Lorain";
  std::vector<EntitySpan> spans = {
      {0, 13, EntityCategory::kPerson, "Toni Morrison"},
      {23, 29, EntityCategory::kLocation, "Lorain"}};
  EXPECT_EQ(LabelEntities(text, spans), "<PERSON> lives in <LOCATION>");
}

TEST(LabelTest, NoSpansIsIdentity) {
  EXPECT_EQ(LabelEntities("plain", {}), "plain");
}

TEST(LabelTest, EnronSampleForm) {
  const std::string text = kEnronSample;
  const std::string out = LabelEntities(text, EnronDetector().Detect(text));
  EXPECT_NE(out.find("I arrive in <LOCATION> on <DATE_TIME>"),
            std::string::npos)
      << out;
  EXPECT_EQ(out.rfind("<PERSON>, I have received", 0), 0u) << out;
  EXPECT_NE(out.find("Thanks <PERSON> <EMAIL_ADDRESS> and"), std::string::npos)
      << out;
}

TEST(PlaceholderTest, FindsLabelTokens) {
  const std::string text = "<PERSON> met <DATE_TIME> at a<b c>";
  auto found = FindPlaceholders(text);
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(text.substr(found[0].first, found[0].second - found[0].first),
            "<PERSON>");
  EXPECT_EQ(text.substr(found[1].first, found[1].second - found[1].first),
            "<DATE_TIME>");
}

TEST(SynthesisTest, PromptEmbedsText) {
  const std::string prompt = BuildSynthesisPrompt("<PERSON> smiled.");
  EXPECT_NE(prompt.find("input: <PERSON> smiled.\noutput:"),
            std::string::npos);
  EXPECT_EQ(prompt.find("{anonymized_text}"), std::string::npos);
}

TEST(SynthesisTest, MockFillsPlaceholders) {
  MockGenerationClient gen;
  EXPECT_EQ(Synthesize("<PERSON> was the chief science officer at "
                       "<ORGANIZATION>.",
                       gen),
            "Katherine Buckjov was the chief science officer at NASA.");
  ASSERT_EQ(gen.request_count(), 1u);
  EXPECT_DOUBLE_EQ(gen.requests()[0].temperature, kSynthesisTemperature);
}

TEST(SynthesisTest, NoPlaceholdersIsIdentity) {
  MockGenerationClient gen;
  EXPECT_EQ(Synthesize("no placeholders here", gen), "no placeholders here");
}

TEST(SynthesisTest, EnronSampleFullySynthetic) {
  MockGenerationClient gen;
  const std::string text = kEnronSample;
  const std::string labeled = LabelEntities(text, EnronDetector().Detect(text));
  const std::string out = Synthesize(labeled, gen);
  EXPECT_TRUE(FindPlaceholders(out).empty()) << out;
  EXPECT_EQ(out.find('<'), std::string::npos);
}

TEST(SynthesisTest, EmptyOutputIsGenerationError) {
  MockGenerationClient gen;
  gen.SetOverride([](const std::string&) { return std::string("  "); });
  EXPECT_THROW(Synthesize("<PERSON>", gen), GenerationError);
}

TEST(GazetteerTest, LoadsSampleDirectory) {
  Gazetteer g = Gazetteer::LoadDirectory(std::string(ANONRAG_SOURCE_DIR) +
                                         "/data/sample/gazetteers");
  EXPECT_GT(g.size(), 10u);
  auto spans = PiiDetector(std::move(g)).Detect("Arun Sarin visited Newbury.");
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].category, EntityCategory::kPerson);
  EXPECT_EQ(spans[1].category, EntityCategory::kLocation);
}

TEST(CategoryTest, NamesRoundTrip) {
  for (EntityCategory c : kAllCategories) {
    EXPECT_EQ(ParseCategory(CategoryName(c)), c);
    EXPECT_EQ(CategoryLabel(c), "<" + std::string(CategoryName(c)) + ">");
  }
}

}  // namespace
}  // namespace anonrag
