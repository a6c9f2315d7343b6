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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anonrag/dp.h"
#include "anonrag/errors.h"
#include "anonrag/mocks.h"

namespace anonrag {
namespace {

EmbeddingLexicon RandomLexicon(std::size_t v, std::size_t dim,
                               std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> words;
  std::vector<Vector> vectors;
  for (std::size_t i = 0; i < v; ++i) {
    words.push_back("w" + std::to_string(i));
    Vector x(dim);
    for (double& c : x) c = normal(rng);
    vectors.push_back(std::move(x));
  }
  return EmbeddingLexicon(std::move(words), std::move(vectors));
}

TEST(LexiconTest, ParsesGloveText) {
  std::istringstream in("cat 0.1 0.2\ndog 0.3 -0.4\n\n");
  EmbeddingLexicon lex = EmbeddingLexicon::Parse(in);
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.dimension(), 2u);
  EXPECT_EQ(lex.IndexOf("dog"), 1u);
  EXPECT_FALSE(lex.IndexOf("cow").has_value());
}

TEST(LexiconTest, RejectsRaggedRows) {
  std::istringstream in("cat 0.1 0.2\ndog 0.3\n");
  EXPECT_THROW(EmbeddingLexicon::Parse(in), ParameterError);
}

TEST(LexiconTest, LoadsSampleFile) {
  EmbeddingLexicon lex = EmbeddingLexicon::Load(
      std::string(ANONRAG_SOURCE_DIR) + "/data/sample/lexicon.txt");
  EXPECT_GT(lex.size(), 100u);
  EXPECT_EQ(lex.dimension(), 16u);
}

TEST(ListsTest, OneDimensionalOrdering) {
  EmbeddingLexicon lex({"a", "b", "c"}, {{0.0}, {1.0}, {2.0}});
  DiffractorLists lists = BuildLists(lex, 1, 3);
  const auto& l = lists.list(0);
  const std::vector<std::uint32_t> up = {0, 1, 2}, down = {2, 1, 0};
  EXPECT_TRUE(l == up || l == down);
}

TEST(ListsTest, DeterministicForSeed) {
  EmbeddingLexicon lex = RandomLexicon(200, 8, 1);
  DiffractorLists a = BuildLists(lex, 4, 17);
  DiffractorLists b = BuildLists(lex, 4, 17);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.list(i), b.list(i));
}

TEST(ListsTest, EveryListIsAPermutation) {
  EmbeddingLexicon lex = RandomLexicon(1000, 8, 2);
  DiffractorLists lists = BuildLists(lex, 16, 5);
  ASSERT_EQ(lists.num_lists(), 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    std::vector<std::uint32_t> sorted = lists.list(i);
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t k = 0; k < 1000; ++k) ASSERT_EQ(sorted[k], k);
    for (std::uint32_t w = 0; w < 1000; w += 97) {
      EXPECT_EQ(lists.list(i)[lists.PositionOf(i, w)], w);
    }
  }
}

TEST(GeometricTest, LargeEpsilonConcentratesAtZero) {
  Rng rng(1);
  int zeros = 0;
  for (int i = 0; i < 10000; ++i) zeros += GeometricSample(50, rng) == 0;
  EXPECT_GT(zeros / 10000.0, 0.999);
}

TEST(GeometricTest, ZeroProbabilityAtEpsilonOne) {
  Rng rng(2);
  const int n = 100000;
  int zeros = 0;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    long k = GeometricSample(1, rng);
    zeros += k == 0;
    sum += static_cast<double>(k);
  }
  const double expected = (1 - std::exp(-1.0)) / (1 + std::exp(-1.0));
  EXPECT_NEAR(expected, 0.4621, 1e-4);
  EXPECT_NEAR(zeros / static_cast<double>(n), expected, 0.01);
  EXPECT_NEAR(sum / n, 0.0, 0.05);
}

TEST(GeometricTest, PmfSumsToOne) {
  for (double eps : {0.5, 1.0, 3.0}) {
    double total = 0;
    for (long k = -200; k <= 200; ++k) total += GeometricPmf(k, eps);
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(GeometricPmf(3, eps), GeometricPmf(-3, eps));
  }
}

TEST(GeometricTest, RejectsNonPositiveEpsilon) {
  Rng rng(0);
  EXPECT_THROW(GeometricSample(0, rng), ParameterError);
  EXPECT_THROW(GeometricSample(-1, rng), ParameterError);
}

TEST(PerturbTest, OutOfVocabularyPassesThrough) {
  EmbeddingLexicon lex = RandomLexicon(50, 4, 3);
  DiffractorLists lists = BuildLists(lex, 4, 3);
  Rng rng(4);
  EXPECT_EQ(PerturbWord("enron.com", PrivacyBudget::PerWord(1), lists, lex,
                        rng),
            "enron.com");
}

TEST(PerturbTest, LargeEpsilonKeepsWord) {
  EmbeddingLexicon lex = RandomLexicon(1000, 8, 5);
  DiffractorLists lists = BuildLists(lex, 16, 5);
  Rng rng(6);
  int same = 0;
  for (int i = 0; i < 10000; ++i) {
    same += PerturbWord("w500", PrivacyBudget::PerWord(50), lists, lex,
                        rng) == "w500";
  }
  EXPECT_GT(same / 10000.0, 0.99);
}

TEST(PerturbTest, SmallEpsilonReplacesOften) {
  EmbeddingLexicon lex = RandomLexicon(10000, 8, 7);
  DiffractorLists lists = BuildLists(lex, 16, 7);
  Rng rng(8);
  int changed = 0;
  for (int i = 0; i < 10000; ++i) {
    changed += PerturbWord("w4242", PrivacyBudget::PerWord(1), lists, lex,
                           rng) != "w4242";
  }
  EXPECT_GT(changed / 10000.0, 0.3);
}

TEST(PerturbTest, RequiresPerWordBudget) {
  EmbeddingLexicon lex = RandomLexicon(10, 2, 1);
  DiffractorLists lists = BuildLists(lex, 2, 1);
  Rng rng(1);
  EXPECT_THROW(ObfuscateText("w1", PrivacyBudget::PerDocument(1), lists, lex,
                             rng),
               ParameterError);
}

TEST(TokenizeTest, SeparatesPunctuation) {
  EXPECT_EQ(TokenizeForObfuscation("Hi, Bob."),
            (std::vector<std::string>{"hi", ",", "bob", "."}));
  EXPECT_EQ(TokenizeForObfuscation("shelley.corman@enron.com"),
            (std::vector<std::string>{"shelley.corman", "@", "enron.com"}));
  EXPECT_EQ(TokenizeForObfuscation("I'll go"),
            (std::vector<std::string>{"i'll", "go"}));
}

TEST(ObfuscateTest, EmptyText) {
  EmbeddingLexicon lex = RandomLexicon(10, 2, 1);
  DiffractorLists lists = BuildLists(lex, 2, 1);
  Rng rng(1);
  EXPECT_EQ(ObfuscateText("", PrivacyBudget::PerWord(1), lists, lex, rng), "");
}

TEST(ObfuscateTest, HugeEpsilonIsNormalizedIdentity) {
  EmbeddingLexicon lex({"sharon", "i", "have", "received", "the", "names"},
                       {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}, {3, 1}});
  DiffractorLists lists = BuildLists(lex, 4, 1);
  Rng rng(1);
  EXPECT_EQ(ObfuscateText("Sharon, I have received the names.",
                          PrivacyBudget::PerWord(1e6), lists, lex, rng),
            "sharon , i have received the names .");
}

TEST(ObfuscateTest, SeededRunsAgree) {
  EmbeddingLexicon lex = RandomLexicon(300, 4, 9);
  DiffractorLists lists = BuildLists(lex, 8, 9);
  std::string text;
  for (int i = 0; i < 50; ++i) text += "w" + std::to_string(i * 5) + " ";
  Rng a(77), b(77);
  EXPECT_EQ(ObfuscateText(text, PrivacyBudget::PerWord(1), lists, lex, a),
            ObfuscateText(text, PrivacyBudget::PerWord(1), lists, lex, b));
}

TEST(DpPromptTest, TemperatureFormula) {
  RewriterConfig cfg;
  cfg.epsilon = PrivacyBudget::PerDocument(200);
  EXPECT_DOUBLE_EQ(DpPromptTemperature(cfg), 1.0);
  cfg.epsilon = PrivacyBudget::PerDocument(150);
  EXPECT_NEAR(DpPromptTemperature(cfg), 4.0 / 3.0, 1e-12);
}

TEST(DpPromptTest, GridBudgetsAccepted) {
  MockGenerationClient gen;
  for (double eps : kDpPromptEpsilons) {
    RewriterConfig cfg;
    cfg.epsilon = PrivacyBudget::PerDocument(eps);
    EXPECT_EQ(DpPromptRewrite("The cat sat.", cfg, gen), "The cat sat.");
  }
  ASSERT_EQ(gen.request_count(), 3u);
  EXPECT_EQ(gen.requests()[0].prompt,
            "Paraphrase the following document: The cat sat.");
  EXPECT_NEAR(gen.requests()[0].temperature, 200.0 / 150.0, 1e-12);
}

TEST(DpPromptTest, TemperatureAboveEndpointLimitFails) {
  MockGenerationClient gen;
  RewriterConfig cfg;
  cfg.epsilon = PrivacyBudget::PerDocument(10);
  EXPECT_THROW(DpPromptRewrite("text", cfg, gen), ConfigurationError);
  EXPECT_EQ(gen.request_count(), 0u);
}

TEST(DpPromptTest, InvalidClipBoundsFail) {
  RewriterConfig cfg;
  cfg.clip_low = 5;
  cfg.clip_high = 5;
  EXPECT_THROW(cfg.Validate(), ParameterError);
}

class ConstantRewriter : public RewriterClient {
 public:
  std::string Rewrite(const std::string& text, double) override {
    std::string out;
    bool in_word = false;
    for (char c : text) {
      if (c == ' ') {
        out += ' ';
        in_word = false;
      } else if (!in_word) {
        out += 'w';
        in_word = true;
      }
    }
    return out;
  }
};

TEST(DpMlmTest, MockReplacingEveryWord) {
  ConstantRewriter rewriter;
  for (double eps : kDpMlmEpsilons) {
    RewriterConfig cfg;
    cfg.epsilon = PrivacyBudget::PerDocument(eps);
    EXPECT_EQ(DpMlmRewrite("one two three", cfg, &rewriter), "w w w");
  }
}

TEST(DpMlmTest, MissingBackendIsUnavailable) {
  RewriterConfig cfg;
  cfg.epsilon = PrivacyBudget::PerDocument(50);
  EXPECT_THROW(DpMlmRewrite("text", cfg, nullptr), MethodUnavailable);
}

}  // namespace
}  // namespace anonrag
