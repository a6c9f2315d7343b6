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

#include "anonrag/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "anonrag/errors.h"
#include "anonrag/text_util.h"

namespace anonrag {

std::vector<std::string> RougeTokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!IsAsciiAlnum(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && IsAsciiAlnum(text[j])) ++j;
    tokens.push_back(ToLowerAscii(text.substr(i, j - i)));
    i = j;
  }
  return tokens;
}

namespace {

std::size_t LcsLength(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  // Two-row table over the shorter side.
  const auto& outer = a.size() >= b.size() ? a : b;
  const auto& inner = a.size() >= b.size() ? b : a;
  std::vector<std::size_t> prev(inner.size() + 1, 0), cur(inner.size() + 1, 0);
  for (const auto& x : outer) {
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      cur[j] = x == inner[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[inner.size()];
}

}  // namespace

double RougeL(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const double lcs = static_cast<double>(LcsLength(candidate, reference));
  const double p = lcs / static_cast<double>(candidate.size());
  const double r = lcs / static_cast<double>(reference.size());
  if (p + r == 0) return 0.0;
  return 2 * p * r / (p + r);
}

double RougeL(std::string_view candidate, std::string_view reference) {
  return RougeL(RougeTokenize(candidate), RougeTokenize(reference));
}

double CosineSim(const Vector& v, const Vector& w) {
  if (v.size() != w.size()) {
    throw ParameterError("cosine of vectors with different dimensions");
  }
  const double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
  const double ww = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  if (vv == 0 || ww == 0) {
    throw ParameterError("cosine similarity undefined for a zero vector");
  }
  const double dot = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
  return std::clamp(dot / (std::sqrt(vv) * std::sqrt(ww)), -1.0, 1.0);
}

double Perplexity(const std::string& text, NllScorer& scorer) {
  NllResult r = scorer.Score(text);
  if (r.token_count <= 0) {
    throw ParameterError("perplexity of a text with no tokens");
  }
  return std::exp(std::max(0.0, r.mean_nll));
}

UnigramNllScorer::UnigramNllScorer(const std::vector<std::string>& corpus) {
  for (const auto& doc : corpus) {
    for (auto& token : RougeTokenize(doc)) {
      ++counts_[token];
      ++total_;
    }
  }
}

double UnigramNllScorer::Probability(const std::string& token) const {
  auto it = counts_.find(token);
  const double count = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
  return (count + 1) /
         static_cast<double>(total_ + static_cast<long>(counts_.size()) + 1);
}

NllResult UnigramNllScorer::Score(const std::string& text) {
  auto tokens = RougeTokenize(text);
  NllResult r;
  r.token_count = static_cast<long>(tokens.size());
  if (tokens.empty()) return r;
  double sum = 0;
  for (const auto& t : tokens) sum -= std::log(Probability(t));
  r.mean_nll = sum / static_cast<double>(tokens.size());
  return r;
}

bool TradeOff::infinite() const { return std::isinf(value); }

TradeOff ComputeTradeOff(double rl, double cs, double llmj) {
  if (!(rl >= 0 && rl <= 1)) throw ParameterError("RL outside [0,1]");
  if (!(cs >= -1 && cs <= 1)) throw ParameterError("CS outside [-1,1]");
  if (!(llmj >= 0 && llmj <= 100)) {
    throw ParameterError("LLM-J outside [0,100]");
  }
  TradeOff t{0, llmj, rl, cs};
  const double utility = 0.5 * (rl + cs);
  if (utility < 1 - kTradeOffGuard) {
    t.value = (1 - llmj / 100) / (1 - utility);
  } else {
    t.value = std::numeric_limits<double>::infinity();
  }
  return t;
}

std::vector<AggregateRow> Aggregate(const std::vector<MetricSample>& samples) {
  using Key = std::tuple<std::string, std::string, double, bool, std::string>;
  struct Acc {
    AggregateRow row;
    double rl = 0, cs = 0, ppl = 0, llmj = 0;
  };
  std::map<Key, Acc> groups;
  for (const auto& s : samples) {
    Key key{s.dataset, s.method, s.epsilon.value_or(0), s.epsilon.has_value(),
            s.placement};
    Acc& acc = groups[key];
    if (acc.row.count == 0) {
      acc.row.dataset = s.dataset;
      acc.row.method = s.method;
      acc.row.epsilon = s.epsilon;
      acc.row.placement = s.placement;
    }
    ++acc.row.count;
    if (s.rouge_l) acc.rl += *s.rouge_l, ++acc.row.rouge_l_n;
    if (s.cosine) acc.cs += *s.cosine, ++acc.row.cosine_n;
    if (s.perplexity) acc.ppl += *s.perplexity, ++acc.row.perplexity_n;
    if (s.llmj) acc.llmj += *s.llmj, ++acc.row.llmj_n;
  }
  std::vector<AggregateRow> rows;
  for (auto& [key, acc] : groups) {
    AggregateRow& row = acc.row;
    auto mean = [](double sum, std::size_t n) -> std::optional<double> {
      if (n == 0) return std::nullopt;
      return sum / static_cast<double>(n);
    };
    row.rouge_l = mean(acc.rl, row.rouge_l_n);
    row.cosine = mean(acc.cs, row.cosine_n);
    row.perplexity = mean(acc.ppl, row.perplexity_n);
    row.llmj = mean(acc.llmj, row.llmj_n);
    if (row.rouge_l && row.cosine && row.llmj) {
      row.tradeoff = ComputeTradeOff(std::clamp(*row.rouge_l, 0.0, 1.0),
                                     std::clamp(*row.cosine, -1.0, 1.0),
                                     std::clamp(*row.llmj, 0.0, 100.0));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace anonrag
