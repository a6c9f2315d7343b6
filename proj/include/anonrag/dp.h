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

#ifndef ANONRAG_DP_H_
#define ANONRAG_DP_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anonrag/clients.h"

namespace anonrag {

using Rng = std::mt19937_64;

inline constexpr std::array<double, 3> kDiffractorEpsilons = {1, 2, 3};
inline constexpr std::array<double, 3> kDpPromptEpsilons = {150, 200, 250};
inline constexpr std::array<double, 3> kDpMlmEpsilons = {50, 75, 100};
inline constexpr std::size_t kDefaultNumLists = 16;

enum class BudgetScope { kPerWord, kPerDocument };

struct PrivacyBudget {
  double epsilon = 1;
  BudgetScope scope = BudgetScope::kPerWord;

  // Both throw ParameterError unless epsilon > 0.
  static PrivacyBudget PerWord(double epsilon);
  static PrivacyBudget PerDocument(double epsilon);
};

// Word vectors, GloVe text layout: "word f1 f2 ... fd" per line.
class EmbeddingLexicon {
 public:
  EmbeddingLexicon(std::vector<std::string> words, std::vector<Vector> vectors);

  static EmbeddingLexicon Parse(std::istream& in);
  static EmbeddingLexicon Load(const std::string& path);

  std::size_t size() const { return words_.size(); }
  std::size_t dimension() const { return dimension_; }
  const std::string& word(std::size_t i) const { return words_[i]; }
  const Vector& vector(std::size_t i) const { return vectors_[i]; }
  std::optional<std::size_t> IndexOf(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  std::vector<Vector> vectors_;
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

// L orderings of the vocabulary, each sorted by the projection of the word
// vectors onto a random unit direction.
class DiffractorLists {
 public:
  explicit DiffractorLists(std::vector<std::vector<std::uint32_t>> lists);

  std::size_t num_lists() const { return lists_.size(); }
  const std::vector<std::uint32_t>& list(std::size_t i) const {
    return lists_[i];
  }
  std::size_t PositionOf(std::size_t list, std::size_t word_index) const {
    return positions_[list][word_index];
  }

 private:
  std::vector<std::vector<std::uint32_t>> lists_;
  std::vector<std::vector<std::uint32_t>> positions_;
};

DiffractorLists BuildLists(const EmbeddingLexicon& lex, std::size_t num_lists,
                           std::uint64_t seed);

// Uniform double in the open interval (0, 1).
double UniformOpen01(Rng& rng);

// Two-sided geometric noise, p(k) = (1-a)/(1+a) * a^|k| with a = exp(-eps),
// drawn by inverting the CDF.
long GeometricSample(double epsilon, Rng& rng);
double GeometricPmf(long k, double epsilon);

// Replaces an in-vocabulary word by the word at a noisy position of a
// uniformly chosen list; the position is clamped to the list bounds.
// Out-of-vocabulary words come back unchanged.
std::string PerturbWord(std::string_view word, const PrivacyBudget& budget,
                        const DiffractorLists& lists,
                        const EmbeddingLexicon& lex, Rng& rng);

// Lowercases and isolates punctuation: "Hi, Bob." -> {"hi", ",", "bob", "."}.
// Runs of letters and digits stay together, including inner '.', '-', '_'
// and '\'' ("enron.com").
std::vector<std::string> TokenizeForObfuscation(std::string_view text);

// Perturbs every alphabetic token and joins all tokens with single spaces.
std::string ObfuscateText(std::string_view text, const PrivacyBudget& budget,
                          const DiffractorLists& lists,
                          const EmbeddingLexicon& lex, Rng& rng);

struct RewriterConfig {
  std::string endpoint;
  double clip_low = -50;
  double clip_high = 50;
  PrivacyBudget epsilon = PrivacyBudget::PerDocument(1);

  void Validate() const;
};

// Sampling temperature giving per-token epsilon-DP when logits are clipped
// to [clip_low, clip_high]: T = 2 * (clip_high - clip_low) / epsilon.
double DpPromptTemperature(const RewriterConfig& cfg);

std::string BuildParaphrasePrompt(std::string_view text);

std::string DpPromptRewrite(std::string_view text, const RewriterConfig& cfg,
                            GenerationClient& gen);

// Throws MethodUnavailable when no rewriter backend is configured.
std::string DpMlmRewrite(std::string_view text, const RewriterConfig& cfg,
                         RewriterClient* rewriter);

}  // namespace anonrag

#endif  // ANONRAG_DP_H_
