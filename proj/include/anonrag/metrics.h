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

#ifndef ANONRAG_METRICS_H_
#define ANONRAG_METRICS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anonrag/clients.h"

namespace anonrag {

// Lowercased runs of ASCII letters and digits.
std::vector<std::string> RougeTokenize(std::string_view text);

// LCS-based F1. Zero when either side is empty.
double RougeL(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference);
double RougeL(std::string_view candidate, std::string_view reference);

// Throws ParameterError on mismatched dimensions or a zero vector.
double CosineSim(const Vector& v, const Vector& w);

// exp(mean NLL) as reported by the scorer.
double Perplexity(const std::string& text, NllScorer& scorer);

// Add-one smoothed unigram model fitted on a reference corpus. Unknown
// words share one extra vocabulary slot:
//   p(w) = (count(w) + 1) / (N + V + 1)
// with N corpus tokens and V distinct words.
class UnigramNllScorer : public NllScorer {
 public:
  explicit UnigramNllScorer(const std::vector<std::string>& corpus);
  NllResult Score(const std::string& text) override;
  double Probability(const std::string& token) const;

 private:
  std::unordered_map<std::string, long> counts_;
  long total_ = 0;
};

struct UtilityScores {
  std::optional<double> rouge_l;
  std::optional<double> cosine;
  std::optional<double> perplexity;
};

struct TradeOff {
  double value = 0;  // +infinity at perfect utility
  double llmj = 0;
  double rl = 0;
  double cs = 0;

  bool infinite() const;
};

inline constexpr double kTradeOffGuard = 1e-9;

// (1 - llmj/100) / (1 - (rl + cs)/2). Perplexity takes no part.
TradeOff ComputeTradeOff(double rl, double cs, double llmj);

// One metric observation per record; absent values are skipped.
struct MetricSample {
  std::string dataset;
  std::string method;  // variant canonical tag
  std::optional<double> epsilon;
  std::string placement;
  std::optional<double> rouge_l;
  std::optional<double> cosine;
  std::optional<double> perplexity;
  std::optional<double> llmj;
};

struct AggregateRow {
  std::string dataset;
  std::string method;
  std::optional<double> epsilon;
  std::string placement;
  std::size_t count = 0;  // records in the group
  std::optional<double> rouge_l;
  std::optional<double> cosine;
  std::optional<double> perplexity;
  std::optional<double> llmj;
  std::size_t rouge_l_n = 0;
  std::size_t cosine_n = 0;
  std::size_t perplexity_n = 0;
  std::size_t llmj_n = 0;
  // From the averaged RL, CS and LLM-J when all three exist.
  std::optional<TradeOff> tradeoff;
};

// Arithmetic means grouped by (dataset, method, epsilon, placement), in
// key order.
std::vector<AggregateRow> Aggregate(const std::vector<MetricSample>& samples);

}  // namespace anonrag

#endif  // ANONRAG_METRICS_H_
