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
#include <limits>

#include "anonrag/errors.h"
#include "anonrag/metrics.h"

namespace anonrag {
namespace {

TEST(RougeTest, IdenticalTexts) {
  EXPECT_DOUBLE_EQ(RougeL("the cat sat", "the cat sat"), 1.0);
}

TEST(RougeTest, DisjointTexts) {
  EXPECT_DOUBLE_EQ(RougeL("alpha beta", "gamma delta"), 0.0);
}

TEST(RougeTest, HandWorkedExample) {
  EXPECT_NEAR(RougeL("the cat sat", "the cat ran"), 2.0 / 3.0, 1e-12);
}

TEST(RougeTest, EmptySideIsZero) {
  EXPECT_DOUBLE_EQ(RougeL("", "something"), 0.0);
  EXPECT_DOUBLE_EQ(RougeL("", ""), 0.0);
}

TEST(RougeTest, TokenizerNormalizes) {
  EXPECT_EQ(RougeTokenize("The CAT, sat!"),
            (std::vector<std::string>{"the", "cat", "sat"}));
  EXPECT_DOUBLE_EQ(RougeL("The cat sat.", "the cat sat"), 1.0);
}

TEST(RougeTest, AsymmetricLengths) {
  // LCS 2, P = 2/2, R = 2/4, F = 2PR/(P+R) = 2/3.
  EXPECT_NEAR(RougeL("a b", "a x b y"), 2.0 / 3.0, 1e-12);
}

TEST(CosineTest, Cases) {
  EXPECT_NEAR(CosineSim({2, 3}, {2, 3}), 1.0, 1e-12);
  EXPECT_NEAR(CosineSim({1, 0}, {0, 5}), 0.0, 1e-12);
  EXPECT_NEAR(CosineSim({1, 0}, {1, 1}), 0.70710678, 1e-6);
  EXPECT_THROW(CosineSim({1, 0}, {1, 0, 0}), ParameterError);
  EXPECT_THROW(CosineSim({0, 0}, {1, 0}), ParameterError);
}

TEST(PerplexityTest, SingleWordClosedForm) {
  UnigramNllScorer scorer({"a a a"});
  // p(a) = (3 + 1) / (3 + 1 + 1) = 0.8.
  EXPECT_NEAR(scorer.Probability("a"), 0.8, 1e-12);
  EXPECT_NEAR(Perplexity("a", scorer), 1.25, 1e-12);
  EXPECT_NEAR(Perplexity("a a a a", scorer), 1.25, 1e-12);
}

TEST(PerplexityTest, AtLeastOneAndOrdered) {
  UnigramNllScorer scorer({"the the the the cat dog bird fish tree rock"});
  const double repeated = Perplexity("the the the the the the", scorer);
  const double varied = Perplexity("cat dog bird fish tree rock", scorer);
  EXPECT_GE(repeated, 1.0);
  EXPECT_GE(varied, 1.0);
  EXPECT_LT(repeated, varied);
}

TEST(PerplexityTest, NoTokensIsError) {
  UnigramNllScorer scorer({"a"});
  EXPECT_THROW(Perplexity("!!!", scorer), ParameterError);
}

TEST(TradeOffTest, KnownAnchors) {
  EXPECT_NEAR(ComputeTradeOff(0.47, 0.80, 8).value, 2.52, 0.005);
  EXPECT_NEAR(ComputeTradeOff(0.93, 0.80, 23).value, 5.70, 0.005);
}

TEST(TradeOffTest, PerfectUtilityIsInfinite) {
  TradeOff t = ComputeTradeOff(1.0, 1.0, 0);
  EXPECT_TRUE(t.infinite());
  EXPECT_TRUE(std::isinf(t.value));
}

TEST(TradeOffTest, RangeChecks) {
  EXPECT_THROW(ComputeTradeOff(1.2, 0.5, 10), ParameterError);
  EXPECT_THROW(ComputeTradeOff(0.5, 0.5, 101), ParameterError);
  EXPECT_THROW(ComputeTradeOff(0.5, -1.5, 10), ParameterError);
}

MetricSample Sample(std::string method, double rl, double cs, double llmj) {
  MetricSample s;
  s.dataset = "bbc";
  s.method = std::move(method);
  s.placement = "pre";
  s.rouge_l = rl;
  s.cosine = cs;
  s.llmj = llmj;
  return s;
}

TEST(AggregateTest, SingleRecord) {
  auto rows = Aggregate({Sample("pii_delete", 0.4, 0.7, 10)});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(*rows[0].rouge_l, 0.4);
  EXPECT_DOUBLE_EQ(*rows[0].cosine, 0.7);
  EXPECT_DOUBLE_EQ(*rows[0].llmj, 10);
  EXPECT_EQ(rows[0].count, 1u);
}

TEST(AggregateTest, MeanOfTwo) {
  auto rows = Aggregate({Sample("m", 0.4, 0.5, 0), Sample("m", 0.6, 0.5, 0)});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(*rows[0].rouge_l, 0.5);
  EXPECT_EQ(rows[0].count, 2u);
  EXPECT_DOUBLE_EQ(rows[0].tradeoff->value,
                   ComputeTradeOff(0.5, 0.5, 0).value);
}

TEST(AggregateTest, GroupCounts) {
  std::vector<MetricSample> samples;
  for (int m = 0; m < 12; ++m) {
    for (int i = 0; i < 30; ++i) {
      samples.push_back(Sample("m" + std::to_string(m), 0.5, 0.5, 50));
    }
  }
  auto rows = Aggregate(samples);
  ASSERT_EQ(rows.size(), 12u);
  for (const auto& r : rows) EXPECT_EQ(r.count, 30u);
}

TEST(AggregateTest, AbsentValuesAreSkipped) {
  MetricSample a = Sample("m", 0.2, 0.4, 30);
  MetricSample b = Sample("m", 0.4, 0.4, 30);
  b.llmj.reset();
  b.perplexity = 12;
  auto rows = Aggregate({a, b});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].llmj_n, 1u);
  EXPECT_DOUBLE_EQ(*rows[0].llmj, 30);
  EXPECT_DOUBLE_EQ(*rows[0].perplexity, 12);
  EXPECT_EQ(rows[0].perplexity_n, 1u);
}

}  // namespace
}  // namespace anonrag
