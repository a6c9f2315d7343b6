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

#include "anonrag/dp.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "anonrag/errors.h"
#include "anonrag/text_util.h"

namespace anonrag {

PrivacyBudget PrivacyBudget::PerWord(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be positive, got " +
                         FormatNumber(epsilon));
  }
  return PrivacyBudget{epsilon, BudgetScope::kPerWord};
}

PrivacyBudget PrivacyBudget::PerDocument(double epsilon) {
  PrivacyBudget b = PerWord(epsilon);
  b.scope = BudgetScope::kPerDocument;
  return b;
}

EmbeddingLexicon::EmbeddingLexicon(std::vector<std::string> words,
                                   std::vector<Vector> vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (words_.size() != vectors_.size()) {
    throw ParameterError("lexicon has " + std::to_string(words_.size()) +
                         " words but " + std::to_string(vectors_.size()) +
                         " vectors");
  }
  if (!vectors_.empty()) dimension_ = vectors_.front().size();
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (vectors_[i].size() != dimension_ || dimension_ == 0) {
      throw ParameterError("lexicon vector for '" + words_[i] +
                           "' has the wrong dimension");
    }
    if (!index_.emplace(words_[i], i).second) {
      throw ParameterError("duplicate lexicon word '" + words_[i] + "'");
    }
  }
}

EmbeddingLexicon EmbeddingLexicon::Parse(std::istream& in) {
  std::vector<std::string> words;
  std::vector<Vector> vectors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    Vector v;
    std::string value;
    while (fields >> value) {
      auto parsed = ParseNumber(value);
      if (!parsed) {
        throw ParameterError("lexicon line " + std::to_string(line_no) +
                             ": bad number '" + value + "'");
      }
      v.push_back(*parsed);
    }
    if (!vectors.empty() && v.size() != vectors.front().size()) {
      throw ParameterError("lexicon line " + std::to_string(line_no) +
                           ": expected " +
                           std::to_string(vectors.front().size()) +
                           " values, got " + std::to_string(v.size()));
    }
    words.push_back(std::move(word));
    vectors.push_back(std::move(v));
  }
  return EmbeddingLexicon(std::move(words), std::move(vectors));
}

EmbeddingLexicon EmbeddingLexicon::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open lexicon file: " + path);
  return Parse(in);
}

std::optional<std::size_t> EmbeddingLexicon::IndexOf(
    std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

DiffractorLists::DiffractorLists(std::vector<std::vector<std::uint32_t>> lists)
    : lists_(std::move(lists)) {
  positions_.reserve(lists_.size());
  for (const auto& list : lists_) {
    std::vector<std::uint32_t> pos(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      pos[list[i]] = static_cast<std::uint32_t>(i);
    }
    positions_.push_back(std::move(pos));
  }
}

double UniformOpen01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

// Box-Muller over UniformOpen01.
double StandardNormal(Rng& rng) {
  const double u1 = UniformOpen01(rng);
  const double u2 = UniformOpen01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

DiffractorLists BuildLists(const EmbeddingLexicon& lex, std::size_t num_lists,
                           std::uint64_t seed) {
  if (lex.size() == 0) throw ParameterError("empty lexicon");
  if (num_lists == 0) throw ParameterError("num_lists must be at least 1");
  Rng rng(seed);
  std::vector<std::vector<std::uint32_t>> lists;
  lists.reserve(num_lists);
  std::vector<double> projection(lex.size());
  for (std::size_t l = 0; l < num_lists; ++l) {
    Vector direction(lex.dimension());
    double norm = 0;
    while (norm == 0) {
      for (double& x : direction) x = StandardNormal(rng);
      norm = std::sqrt(std::inner_product(direction.begin(), direction.end(),
                                          direction.begin(), 0.0));
    }
    for (double& x : direction) x /= norm;
    for (std::size_t i = 0; i < lex.size(); ++i) {
      const Vector& v = lex.vector(i);
      projection[i] =
          std::inner_product(v.begin(), v.end(), direction.begin(), 0.0);
    }
    std::vector<std::uint32_t> order(lex.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return projection[a] < projection[b];
                     });
    lists.push_back(std::move(order));
  }
  return DiffractorLists(std::move(lists));
}

long GeometricSample(double epsilon, Rng& rng) {
  if (!(epsilon > 0)) {
    throw ParameterError("epsilon must be positive, got " +
                         FormatNumber(epsilon));
  }
  const double alpha = std::exp(-epsilon);
  const double u = UniformOpen01(rng);
  if (alpha == 0) return 0;
  const double log_alpha = -epsilon;
  // F(k) = a^|k| / (1+a) for k <= -1 and 1 - a^(k+1) / (1+a) for k >= 0.
  if (u <= alpha / (1 + alpha)) {
    return -static_cast<long>(std::floor(std::log(u * (1 + alpha)) / log_alpha));
  }
  const double m = std::ceil(std::log((1 - u) * (1 + alpha)) / log_alpha) - 1;
  return std::max(0L, static_cast<long>(m));
}

double GeometricPmf(long k, double epsilon) {
  const double alpha = std::exp(-epsilon);
  return (1 - alpha) / (1 + alpha) *
         std::pow(alpha, static_cast<double>(std::labs(k)));
}

std::string PerturbWord(std::string_view word, const PrivacyBudget& budget,
                        const DiffractorLists& lists,
                        const EmbeddingLexicon& lex, Rng& rng) {
  auto index = lex.IndexOf(word);
  if (!index) return std::string(word);
  const auto list = std::min(
      lists.num_lists() - 1,
      static_cast<std::size_t>(UniformOpen01(rng) *
                               static_cast<double>(lists.num_lists())));
  const long pos = static_cast<long>(lists.PositionOf(list, *index));
  const long last = static_cast<long>(lex.size()) - 1;
  const long noisy = std::clamp(pos + GeometricSample(budget.epsilon, rng), 0L,
                                last);
  return lex.word(lists.list(list)[static_cast<std::size_t>(noisy)]);
}

namespace {

bool IsTokenChar(char c) {
  return IsAsciiAlnum(c) || (static_cast<unsigned char>(c) & 0x80) != 0;
}

bool IsInnerConnector(char c) {
  return c == '.' || c == '-' || c == '_' || c == '\'';
}

bool IsAlphabetic(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(), [](char c) {
           return IsAsciiAlpha(c) || (static_cast<unsigned char>(c) & 0x80);
         });
}

}  // namespace

std::vector<std::string> TokenizeForObfuscation(std::string_view text) {
  const std::string lower = ToLowerAscii(text);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < lower.size()) {
    const char c = lower[i];
    if (IsAsciiSpace(c)) {
      ++i;
    } else if (IsTokenChar(c)) {
      std::size_t j = i;
      while (j < lower.size()) {
        if (IsTokenChar(lower[j])) {
          ++j;
        } else if (IsInnerConnector(lower[j]) && j + 1 < lower.size() &&
                   IsTokenChar(lower[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      tokens.push_back(lower.substr(i, j - i));
      i = j;
    } else {
      tokens.emplace_back(1, c);
      ++i;
    }
  }
  return tokens;
}

std::string ObfuscateText(std::string_view text, const PrivacyBudget& budget,
                          const DiffractorLists& lists,
                          const EmbeddingLexicon& lex, Rng& rng) {
  if (budget.scope != BudgetScope::kPerWord) {
    throw ParameterError("word obfuscation needs a per-word budget");
  }
  std::string out;
  for (const std::string& token : TokenizeForObfuscation(text)) {
    if (!out.empty()) out.push_back(' ');
    if (IsAlphabetic(token)) {
      out += PerturbWord(token, budget, lists, lex, rng);
    } else {
      out += token;
    }
  }
  return out;
}

void RewriterConfig::Validate() const {
  if (!(clip_high > clip_low)) {
    throw ParameterError("clip_high must exceed clip_low");
  }
  if (!(epsilon.epsilon > 0)) throw ParameterError("epsilon must be positive");
}

double DpPromptTemperature(const RewriterConfig& cfg) {
  cfg.Validate();
  return 2.0 * (cfg.clip_high - cfg.clip_low) / cfg.epsilon.epsilon;
}

std::string BuildParaphrasePrompt(std::string_view text) {
  return "Paraphrase the following document: " + std::string(text);
}

std::string DpPromptRewrite(std::string_view text, const RewriterConfig& cfg,
                            GenerationClient& gen) {
  const double temperature = DpPromptTemperature(cfg);
  if (temperature > gen.max_temperature()) {
    throw ConfigurationError(
        "DP-Prompt temperature " + FormatNumber(temperature) +
        " exceeds the endpoint maximum " + FormatNumber(gen.max_temperature()));
  }
  std::string raw = gen.Complete(BuildParaphrasePrompt(text), temperature);
  std::string_view trimmed = Trim(raw);
  if (trimmed.empty()) throw GenerationError("paraphrase came back empty");
  return std::string(trimmed);
}

std::string DpMlmRewrite(std::string_view text, const RewriterConfig& cfg,
                         RewriterClient* rewriter) {
  cfg.Validate();
  if (rewriter == nullptr) {
    throw MethodUnavailable("no DP-MLM rewriter endpoint configured");
  }
  return rewriter->Rewrite(std::string(text), cfg.epsilon.epsilon);
}

}  // namespace anonrag
