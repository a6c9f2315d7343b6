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

#include "anonrag/pii.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>

#include "anonrag/errors.h"
#include "anonrag/text_util.h"

namespace anonrag {

std::string_view CategoryName(EntityCategory category) {
  switch (category) {
    case EntityCategory::kPerson:
      return "PERSON";
    case EntityCategory::kLocation:
      return "LOCATION";
    case EntityCategory::kDateTime:
      return "DATE_TIME";
    case EntityCategory::kEmailAddress:
      return "EMAIL_ADDRESS";
    case EntityCategory::kPhoneNumber:
      return "PHONE_NUMBER";
    case EntityCategory::kOrganization:
      return "ORGANIZATION";
    case EntityCategory::kOther:
      return "OTHER";
  }
  return "OTHER";
}

std::optional<EntityCategory> ParseCategory(std::string_view name) {
  for (EntityCategory c : kAllCategories) {
    if (CategoryName(c) == name) return c;
  }
  return std::nullopt;
}

std::string CategoryLabel(EntityCategory category) {
  return "<" + std::string(CategoryName(category)) + ">";
}

int CategoryPriority(EntityCategory category) {
  switch (category) {
    case EntityCategory::kEmailAddress:
      return 0;
    case EntityCategory::kPhoneNumber:
      return 1;
    case EntityCategory::kDateTime:
      return 2;
    case EntityCategory::kPerson:
      return 3;
    case EntityCategory::kLocation:
      return 4;
    case EntityCategory::kOrganization:
      return 5;
    case EntityCategory::kOther:
      return 6;
  }
  return 6;
}

namespace {

bool IsWordChar(char c) {
  return IsAsciiAlnum(c) || (static_cast<unsigned char>(c) & 0x80) != 0;
}

std::string_view FirstWord(std::string_view entry) {
  std::size_t end = 0;
  while (end < entry.size() && IsWordChar(entry[end])) ++end;
  return entry.substr(0, end);
}

struct Word {
  std::size_t start;
  std::size_t end;
};

std::vector<Word> SplitWords(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!IsWordChar(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && IsWordChar(text[j])) ++j;
    words.push_back({i, j});
    i = j;
  }
  return words;
}

bool IsCapitalized(std::string_view text, const Word& w) {
  return IsAsciiUpper(text[w.start]);
}

// Words separated by exactly one space (or ". " after an initial).
bool Adjacent(std::string_view text, const Word& a, const Word& b) {
  std::string_view gap = text.substr(a.end, b.start - a.end);
  return gap == " " || gap == ". ";
}

const std::vector<std::string_view>& Honorifics() {
  static const std::vector<std::string_view> kList = {
      "Mr", "Mrs", "Ms", "Miss", "Dr", "Prof", "Sir", "Judge", "Mx"};
  return kList;
}

const std::vector<std::string_view>& OrganizationKeywords() {
  static const std::vector<std::string_view> kList = {
      "Inc",        "Corp",       "Corporation", "Company",    "Ltd",
      "LLC",        "PLC",        "University",  "Bank",       "Group",
      "Institute",  "Association", "Agency",     "Ministry",   "Council",
      "Court",      "Committee",  "Commission",  "Department", "Party",
      "Union",      "Foundation", "College",     "Authority",  "Federation"};
  return kList;
}

const std::vector<std::string_view>& OrganizationConnectors() {
  static const std::vector<std::string_view> kList = {"of", "for", "and",
                                                      "the", "&"};
  return kList;
}

bool Contains(const std::vector<std::string_view>& list,
              std::string_view value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

struct PatternRule {
  std::regex re;
  EntityCategory category;
};

const std::vector<PatternRule>& PatternRules() {
  static const std::vector<PatternRule> kRules = [] {
    const auto flags = std::regex::ECMAScript | std::regex::optimize;
    const std::string month =
        "(?:January|February|March|April|June|July|August|September|October|"
        "November|December|Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Sept|Oct|Nov|"
        "Dec)\\.?";
    const std::string full_month =
        "(?:January|February|March|April|June|July|August|September|October|"
        "November|December)";
    const std::string day = "\\d{1,2}(?:st|nd|rd|th)?";
    std::vector<PatternRule> rules;
    rules.push_back(
        {std::regex("[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\\.[A-Za-z0-9-]+)*"
                    "\\.[A-Za-z]{2,}",
                    flags),
         EntityCategory::kEmailAddress});
    rules.push_back(
        {std::regex("(?:\\+\\d{1,3}[ .-]?)?(?:\\(\\d{3}\\) ?|\\d{3}[ .-])"
                    "\\d{3}[ .-]\\d{4}(?!\\d)",
                    flags),
         EntityCategory::kPhoneNumber});
    rules.push_back({std::regex("\\b\\d{3}-\\d{4}\\b", flags),
                     EntityCategory::kPhoneNumber});
    rules.push_back(
        {std::regex("\\b" + month + " " + day + "(?:,? \\d{4})?\\b", flags),
         EntityCategory::kDateTime});
    rules.push_back({std::regex("\\b" + day + " (?:of )?" + month +
                                    "(?:,? \\d{4})?\\b",
                                flags),
                     EntityCategory::kDateTime});
    rules.push_back(
        {std::regex("\\b" + month + " \\d{4}\\b", flags),
         EntityCategory::kDateTime});
    rules.push_back({std::regex("\\b" + full_month + "\\b", flags),
                     EntityCategory::kDateTime});
    rules.push_back(
        {std::regex("\\b(?:Monday|Tuesday|Wednesday|Thursday|Friday|Saturday|"
                    "Sunday)s?\\b",
                    flags),
         EntityCategory::kDateTime});
    rules.push_back({std::regex("\\b\\d{1,2}/\\d{1,2}/\\d{2,4}\\b", flags),
                     EntityCategory::kDateTime});
    rules.push_back({std::regex("\\b\\d{4}-\\d{2}-\\d{2}\\b", flags),
                     EntityCategory::kDateTime});
    rules.push_back({std::regex("\\b(?:19|20)\\d{2}s?\\b", flags),
                     EntityCategory::kDateTime});
    rules.push_back(
        {std::regex("(?:\\b[Tt]he )?\\b\\d{1,2}(?:st|nd|rd|th)\\b", flags),
         EntityCategory::kDateTime});
    rules.push_back(
        {std::regex("\\b\\d{1,2}:\\d{2}(?: ?[AaPp]\\.?[Mm]\\.?)?", flags),
         EntityCategory::kDateTime});
    rules.push_back(
        {std::regex("\\b(?:(?:next|last|this) (?:week|month|year)|yesterday|"
                    "tomorrow|tonight)\\b",
                    flags | std::regex::icase),
         EntityCategory::kDateTime});
    return rules;
  }();
  return kRules;
}

void AddPatternCandidates(std::string_view text,
                          std::vector<EntitySpan>& out) {
  for (const auto& rule : PatternRules()) {
    auto begin =
        std::cregex_iterator(text.data(), text.data() + text.size(), rule.re);
    for (auto it = begin; it != std::cregex_iterator(); ++it) {
      const auto start = static_cast<std::size_t>(it->position(0));
      const auto len = static_cast<std::size_t>(it->length(0));
      if (len == 0) continue;
      // Patterns without a leading \b must still start on a boundary.
      if (start > 0 && IsAsciiAlnum(text[start - 1]) &&
          IsAsciiAlnum(text[start])) {
        continue;
      }
      out.push_back({start, start + len, rule.category,
                     std::string(text.substr(start, len))});
    }
  }
}

void AddGazetteerCandidates(std::string_view text,
                            const std::vector<Word>& words,
                            const Gazetteer& gazetteer,
                            std::vector<EntitySpan>& out) {
  if (gazetteer.size() == 0) return;
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const Word& w = words[wi];
    const auto* entries =
        gazetteer.EntriesStartingWith(text.substr(w.start, w.end - w.start));
    if (entries == nullptr) continue;
    for (const auto& entry : *entries) {
      if (text.compare(w.start, entry.text.size(), entry.text) != 0) continue;
      std::size_t end = w.start + entry.text.size();
      if (end < text.size() && IsWordChar(text[end])) continue;
      if (entry.category == EntityCategory::kPerson) {
        // A known given name absorbs following capitalized surnames.
        std::size_t k = wi;
        while (k < words.size() && words[k].end < end) ++k;
        while (k + 1 < words.size() && words[k].end == end &&
               text.substr(end, words[k + 1].start - end) == " " &&
               IsCapitalized(text, words[k + 1])) {
          ++k;
          end = words[k].end;
        }
      }
      out.push_back(
          {w.start, end, entry.category,
           std::string(text.substr(w.start, end - w.start))});
    }
  }
}

// "Dr. Jane Doe" -> PERSON "Jane Doe".
void AddHonorificCandidates(std::string_view text,
                            const std::vector<Word>& words,
                            std::vector<EntitySpan>& out) {
  for (std::size_t wi = 0; wi + 1 < words.size(); ++wi) {
    std::string_view word =
        text.substr(words[wi].start, words[wi].end - words[wi].start);
    if (!Contains(Honorifics(), word)) continue;
    if (wi > 0 && words[wi].start > 0 &&
        IsAsciiAlnum(text[words[wi].start - 1])) {
      continue;
    }
    std::size_t next = wi + 1;
    if (!Adjacent(text, words[wi], words[next]) ||
        !IsCapitalized(text, words[next])) {
      continue;
    }
    std::size_t start = words[next].start;
    std::size_t end = words[next].end;
    ++next;
    while (next < words.size() && text.substr(words[next - 1].end,
                                              words[next].start -
                                                  words[next - 1].end) == " " &&
           IsCapitalized(text, words[next])) {
      end = words[next].end;
      ++next;
    }
    out.push_back({start, end, EntityCategory::kPerson,
                   std::string(text.substr(start, end - start))});
  }
}

// Capitalized runs (with "of", "for", ... inside) holding an organization
// keyword, e.g. "Howard University", "European Court of Human Rights".
void AddOrganizationCandidates(std::string_view text,
                               const std::vector<Word>& words,
                               std::vector<EntitySpan>& out) {
  std::size_t wi = 0;
  while (wi < words.size()) {
    if (!IsCapitalized(text, words[wi])) {
      ++wi;
      continue;
    }
    std::size_t first = wi;
    std::size_t last = wi;
    bool has_keyword = false;
    std::size_t j = wi;
    // Words before a connector that precedes every keyword are not part of
    // the name: "Jane Doe of Howard University".
    std::size_t start_word = first;
    while (j < words.size()) {
      std::string_view w =
          text.substr(words[j].start, words[j].end - words[j].start);
      if (IsCapitalized(text, words[j])) {
        if (Contains(OrganizationKeywords(), w)) has_keyword = true;
        last = j;
      } else if (!Contains(OrganizationConnectors(), w) || j == first) {
        break;
      } else if (!has_keyword) {
        start_word = j + 1;
      }
      if (j + 1 < words.size()) {
        std::string_view gap = text.substr(words[j].end,
                                           words[j + 1].start - words[j].end);
        if (gap != " " && gap != " & ") break;
      }
      ++j;
    }
    if (has_keyword) {
      std::size_t start = words[start_word].start;
      std::size_t end = words[last].end;
      // "Inc." keeps its dot.
      if (end < text.size() && text[end] == '.' &&
          (text.substr(words[last].start, end - words[last].start) == "Inc" ||
           text.substr(words[last].start, end - words[last].start) == "Corp" ||
           text.substr(words[last].start, end - words[last].start) == "Ltd")) {
        ++end;
      }
      out.push_back({start, end, EntityCategory::kOrganization,
                     std::string(text.substr(start, end - start))});
    }
    wi = last + 1;
  }
}

std::vector<EntitySpan> ResolveOverlaps(std::vector<EntitySpan> candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const EntitySpan& a, const EntitySpan& b) {
              const auto la = a.end - a.start;
              const auto lb = b.end - b.start;
              if (la != lb) return la > lb;
              if (a.start != b.start) return a.start < b.start;
              return CategoryPriority(a.category) <
                     CategoryPriority(b.category);
            });
  std::vector<EntitySpan> accepted;
  for (auto& c : candidates) {
    bool overlaps = std::any_of(
        accepted.begin(), accepted.end(), [&](const EntitySpan& a) {
          return c.start < a.end && a.start < c.end;
        });
    if (!overlaps) accepted.push_back(std::move(c));
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const EntitySpan& a, const EntitySpan& b) {
              return a.start < b.start;
            });
  return accepted;
}

}  // namespace

void Gazetteer::Add(EntityCategory category, std::string_view entry) {
  std::string_view trimmed = Trim(entry);
  std::string_view first = FirstWord(trimmed);
  if (first.empty()) return;
  auto& bucket = by_first_word_[std::string(first)];
  for (const auto& e : bucket) {
    if (e.text == trimmed && e.category == category) return;
  }
  bucket.push_back({std::string(trimmed), category});
  ++size_;
}

Gazetteer Gazetteer::LoadDirectory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw ParameterError("gazetteer directory not found: " + dir);
  }
  Gazetteer g;
  const std::pair<const char*, EntityCategory> files[] = {
      {"persons.txt", EntityCategory::kPerson},
      {"locations.txt", EntityCategory::kLocation},
      {"organizations.txt", EntityCategory::kOrganization},
      {"others.txt", EntityCategory::kOther},
  };
  for (const auto& [name, category] : files) {
    fs::path path = fs::path(dir) / name;
    if (!fs::exists(path)) continue;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) g.Add(category, line);
  }
  return g;
}

const std::vector<Gazetteer::Entry>* Gazetteer::EntriesStartingWith(
    std::string_view word) const {
  auto it = by_first_word_.find(std::string(word));
  return it == by_first_word_.end() ? nullptr : &it->second;
}

std::vector<EntitySpan> PiiDetector::Detect(std::string_view text) const {
  if (text.empty()) return {};
  std::vector<EntitySpan> candidates;
  const std::vector<Word> words = SplitWords(text);
  AddPatternCandidates(text, candidates);
  AddGazetteerCandidates(text, words, gazetteer_, candidates);
  AddHonorificCandidates(text, words, candidates);
  AddOrganizationCandidates(text, words, candidates);
  return ResolveOverlaps(std::move(candidates));
}

void ValidateSpans(std::string_view text, std::span<const EntitySpan> spans) {
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (s.start >= s.end || s.end > text.size()) {
      throw SpanError("span " + std::to_string(i) + " [" +
                      std::to_string(s.start) + "," + std::to_string(s.end) +
                      ") out of range");
    }
    if (i > 0 && s.start < prev_end) {
      throw SpanError("span " + std::to_string(i) +
                      " overlaps or is out of order");
    }
    if (text.substr(s.start, s.end - s.start) != s.surface) {
      throw SpanError("span " + std::to_string(i) +
                      " surface does not match text");
    }
    prev_end = s.end;
  }
}

namespace {

template <typename Replacement>
std::string Splice(std::string_view text, std::span<const EntitySpan> spans,
                   Replacement replacement) {
  ValidateSpans(text, spans);
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (const auto& s : spans) {
    out.append(text.substr(pos, s.start - pos));
    out.append(replacement(s));
    pos = s.end;
  }
  out.append(text.substr(pos));
  return out;
}

}  // namespace

std::string DeleteEntities(std::string_view text,
                           std::span<const EntitySpan> spans) {
  return Splice(text, spans, [](const EntitySpan&) { return std::string(); });
}

std::string LabelEntities(std::string_view text,
                          std::span<const EntitySpan> spans) {
  return Splice(text, spans,
                [](const EntitySpan& s) { return CategoryLabel(s.category); });
}

std::vector<std::pair<std::size_t, std::size_t>> FindPlaceholders(
    std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    std::size_t j = pos + 1;
    while (j < text.size() && (IsAsciiUpper(text[j]) || text[j] == '_')) ++j;
    if (j > pos + 1 && j < text.size() && text[j] == '>') {
      out.emplace_back(pos, j + 1);
      pos = j + 1;
    } else {
      ++pos;
    }
  }
  return out;
}

const std::string_view kSynthesisPromptTemplate =
    "Your role is to create synthetic text based on de-identified text with "
    "placeholders instead of Personally Identifiable Information (PII).\n"
    "Replace the placeholders (e.g., <PERSON>, <DATE>) with fake values.\n"
    "Instructions:\n"
    "a. Use completely random numbers, so every digit is between 0 and 9.\n"
    "b. Use realistic names that come from diverse genders, ethnicities, and "
    "countries.\n"
    "c. If there are no placeholders, return the text as is.\n"
    "d. Keep the formatting as close to the original as possible.\n"
    "e. If PII exists in the input, replace it with fake values in the "
    "output.\n"
    "f. Remove whitespace before and after the generated text.\n"
    "\n"
    "input: <PERSON> was the chief science officer at <ORGANIZATION>.\n"
    "output: Katherine Buckjov was the chief science officer at NASA.\n"
    "input: <PERSON> lives in <LOCATION>.\n"
    "output: Volodymyr lives in Ukraine.\n"
    "input: {anonymized_text}\n"
    "output:";

std::string BuildSynthesisPrompt(std::string_view labeled_text) {
  std::string prompt(kSynthesisPromptTemplate);
  const std::string_view marker = "{anonymized_text}";
  prompt.replace(prompt.find(marker), marker.size(), labeled_text);
  return prompt;
}

std::string Synthesize(std::string_view labeled_text, GenerationClient& gen) {
  std::string raw =
      gen.Complete(BuildSynthesisPrompt(labeled_text), kSynthesisTemperature);
  std::string_view trimmed = Trim(raw);
  if (trimmed.empty()) {
    throw GenerationError("synthetic replacement returned empty output");
  }
  return std::string(trimmed);
}

}  // namespace anonrag
