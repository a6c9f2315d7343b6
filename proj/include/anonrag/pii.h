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

#ifndef ANONRAG_PII_H_
#define ANONRAG_PII_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anonrag/clients.h"

namespace anonrag {

enum class EntityCategory {
  kPerson,
  kLocation,
  kDateTime,
  kEmailAddress,
  kPhoneNumber,
  kOrganization,
  kOther,
};

inline constexpr std::array<EntityCategory, 7> kAllCategories = {
    EntityCategory::kPerson,       EntityCategory::kLocation,
    EntityCategory::kDateTime,     EntityCategory::kEmailAddress,
    EntityCategory::kPhoneNumber,  EntityCategory::kOrganization,
    EntityCategory::kOther,
};

// "PERSON", "DATE_TIME", ...
std::string_view CategoryName(EntityCategory category);
std::optional<EntityCategory> ParseCategory(std::string_view name);
// "<PERSON>"
std::string CategoryLabel(EntityCategory category);
// Lower wins when two equally long candidates start at the same offset.
int CategoryPriority(EntityCategory category);

// Byte offsets into the UTF-8 text; end is exclusive.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  EntityCategory category = EntityCategory::kOther;
  std::string surface;

  bool operator==(const EntitySpan&) const = default;
};

// Known surface forms per category. Matching is case-sensitive on word
// boundaries; multi-word entries are allowed.
class Gazetteer {
 public:
  void Add(EntityCategory category, std::string_view entry);
  // Reads persons.txt, locations.txt, organizations.txt and others.txt when
  // present; one entry per line.
  static Gazetteer LoadDirectory(const std::string& dir);

  struct Entry {
    std::string text;
    EntityCategory category;
  };
  // Entries keyed by their first word.
  const std::vector<Entry>* EntriesStartingWith(std::string_view word) const;
  std::size_t size() const { return size_; }

 private:
  std::unordered_map<std::string, std::vector<Entry>> by_first_word_;
  std::size_t size_ = 0;
};

// Rule and gazetteer based PII detector. EMAIL_ADDRESS, PHONE_NUMBER and
// DATE_TIME come from patterns; PERSON, LOCATION and ORGANIZATION from the
// gazetteer plus capitalization heuristics (honorifics, organization
// keywords). Overlaps resolve longest first, then leftmost, then by
// CategoryPriority.
class PiiDetector {
 public:
  PiiDetector() = default;
  explicit PiiDetector(Gazetteer gazetteer) : gazetteer_(std::move(gazetteer)) {}

  std::vector<EntitySpan> Detect(std::string_view text) const;
  const Gazetteer& gazetteer() const { return gazetteer_; }

 private:
  Gazetteer gazetteer_;
};

// Throws SpanError unless spans are sorted, disjoint, in range and their
// surfaces match the text.
void ValidateSpans(std::string_view text, std::span<const EntitySpan> spans);

// Removes every span; surrounding whitespace is left alone.
std::string DeleteEntities(std::string_view text,
                           std::span<const EntitySpan> spans);
// Replaces every span by its "<CATEGORY>" label.
std::string LabelEntities(std::string_view text,
                          std::span<const EntitySpan> spans);

// Byte ranges of "<UPPER_CASE>" placeholder tokens.
std::vector<std::pair<std::size_t, std::size_t>> FindPlaceholders(
    std::string_view text);

inline constexpr double kSynthesisTemperature = 0.7;

// Few-shot prompt asking the model to fill placeholders with fake values.
extern const std::string_view kSynthesisPromptTemplate;
std::string BuildSynthesisPrompt(std::string_view labeled_text);

// Fills the placeholders of a labeled text with synthetic values through the
// generation endpoint. Returns the trimmed model output.
std::string Synthesize(std::string_view labeled_text, GenerationClient& gen);

}  // namespace anonrag

#endif  // ANONRAG_PII_H_
