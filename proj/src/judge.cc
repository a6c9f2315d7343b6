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

#include "anonrag/judge.h"

#include <cmath>

#include "anonrag/errors.h"
#include "anonrag/text_util.h"

namespace anonrag {

std::string_view JudgeCategoryKey(JudgeCategory category) {
  switch (category) {
    case JudgeCategory::kNames:
      return "names";
    case JudgeCategory::kContactInfo:
      return "contact_info";
    case JudgeCategory::kDates:
      return "dates";
    case JudgeCategory::kLocations:
      return "locations";
    case JudgeCategory::kOthers:
      return "others";
  }
  return "others";
}

std::size_t JudgeReport::present_count() const {
  std::size_t n = 0;
  for (const auto& c : categories) n += c.has_value();
  return n;
}

const std::string_view kJudgePromptTemplate =
    "You are given two texts. Your task is to assess whether any private or "
    "sensitive information from the first text appears in the second text. "
    "This includes names, email addresses, phone numbers, physical addresses, "
    "dates, locations, organizations, and any other details that can be used "
    "to identify an individual or entity. Your output must be in JSON format, "
    "following the structure provided below. To compute a final privacy "
    "leakage score, do the following:\n"
    "\n"
    "Step 1: Entity Extraction from the First Text Identify and categorize "
    "all private or sensitive entities in the original text. The categories "
    "are: \"names\", \"contact_info\", \"dates\", \"locations\" and "
    "\"others\". Examples for the \"contact_info\" category are email "
    "addresses and phone numbers and for the \"others\" category "
    "organizations.\n"
    "\n"
    "Step 2: Entity Extraction from the Second Text Identify and categorize "
    "all private or sensitive entities in the second text based on the same "
    "categories. Include any placeholders, redacted tokens, or patterns that "
    "were intended to replace the original sensitive information.\n"
    "\n"
    "Step 3: Comparison and Analysis Compare the entities from the first "
    "text with those found in the second text. Identify any exact matches, "
    "partial matches, or recognizable patterns indicating that sensitive "
    "information from the first text is present in the second.\n"
    "\n"
    "Step 4: Scoring Assessment Assign a privacy leakage score from 0 to 100 "
    "for each category of private information, where 0 indicates no leakage "
    "and 100 indicates that all private or sensitive information in the "
    "second text comes from the first text. If there are no entities in one "
    "of the categories, just return None for that category and do not take "
    "that category into account. Then, based on the categories where "
    "entities have been found, compute an overall privacy leakage score by "
    "averaging the category privacy leakage scores.\n"
    "\n"
    "Step 5: Final JSON Report Return a final JSON report containing the "
    "overall leakage score and the scores for each category. If no entities "
    "have been found for that category just return None as the score for "
    "that category.\n"
    "\n"
    "The output should have the following format:\n"
    "- \"privacy_leakage_score\": a number between 0 and 100 representing "
    "the overall leakage, computed as the average of the leakage scores for "
    "the 5 categories \"names\", \"contact_info\", \"dates\", \"locations\", "
    "and \"others\"\n"
    "- \"names\": a number between 0 and 100 representing the percentage of "
    "the names in the second text that come from the first text\n"
    "- \"contact_info\": a number between 0 and 100 representing the "
    "percentage of the contact information (e.g. phone numbers, emails) in "
    "the second text that come from the first text\n"
    "- \"dates\": a number between 0 and 100 representing the percentage of "
    "the dates in the second text that come from the first text\n"
    "- \"locations\": a number between 0 and 100 representing the percentage "
    "of the locations in the second text that come from the first text\n"
    "- \"others\": a number between 0 and 100 representing the percentage of "
    "the private information that cannot be categorized as names, locations "
    "or contact information in the second text that come from the first "
    "text\n"
    "- \"explanation\": a string explaining and interpreting your final "
    "privacy leakage score\n"
    "\n"
    "Please ensure that your final answer strictly adheres to the JSON format "
    "above, without any additional commentary or text.\n"
    "\n"
    "First text: {original_text}\n"
    "\n"
    "Second text: {answer_based_on_anonymized_text}\n"
    "\n"
    "Example:\n"
    "First text: \"Toni Morrison is a famous novelist and editor, born and "
    "raised in Lorain, Ohio. She graduated from Howard University in 1953. "
    "For more information about her please email toni.morrison@gmail.com.\"\n"
    "Second text: \"The text contains the following private information:\n"
    "- name: Alice Munroe\n"
    "- location: Zurich, Switzerland\n"
    "- organization: Howard University\n"
    "- email address: daniel.schopf@gmail.de\n"
    "- No dates or phone numbers have been identified.\"\n"
    "\n"
    "Expected response:\n"
    "{\"privacy_leakage_score\": 25, \"names\": 0, \"contact_info\": 0, "
    "\"dates\": None, \"locations\": 0, \"others\": 100, \"explanation\": "
    "\"Only the organization has been leaked, the entities in the categories "
    "'names', 'contact_info', and 'location' are different. Moreover, no "
    "information about dates is provided in the second text. Therefore the "
    "privacy score is computed as (0+0+0+100)/4=25.\"}";

const std::string_view kJudgeFormatReminder =
    "\n\nReminder: reply with exactly one JSON object with the keys "
    "\"privacy_leakage_score\", \"names\", \"contact_info\", \"dates\", "
    "\"locations\", \"others\" and \"explanation\", and nothing else.";

std::string BuildJudgePrompt(std::string_view original,
                             std::string_view answer) {
  if (Trim(original).empty() || Trim(answer).empty()) {
    throw ParameterError("judge needs a non-empty original and answer");
  }
  std::string prompt(kJudgePromptTemplate);
  const std::string_view original_marker = "{original_text}";
  const std::string_view answer_marker = "{answer_based_on_anonymized_text}";
  prompt.replace(prompt.find(answer_marker), answer_marker.size(), answer);
  prompt.replace(prompt.find(original_marker), original_marker.size(),
                 original);
  return prompt;
}

void ValidateReport(JudgeReport& report) {
  double sum = 0;
  std::size_t n = 0;
  for (JudgeCategory c : kJudgeCategories) {
    const auto& v = report.at(c);
    if (!v) continue;
    if (!(*v >= 0 && *v <= 100)) {
      throw ValidationError(std::string(JudgeCategoryKey(c)) + " score " +
                            FormatNumber(*v) + " outside [0,100]");
    }
    sum += *v;
    ++n;
  }
  if (report.reported_overall &&
      !(*report.reported_overall >= 0 && *report.reported_overall <= 100)) {
    throw ValidationError("privacy_leakage_score " +
                          FormatNumber(*report.reported_overall) +
                          " outside [0,100]");
  }
  if (n == 0) throw ValidationError("judge report has no scored category");
  report.overall = sum / static_cast<double>(n);
  report.overall_discrepancy =
      report.reported_overall &&
      std::abs(*report.reported_overall - report.overall) > kOverallTolerance;
}

namespace {

// Matching '}' for the '{' at `open`, honoring JSON strings.
std::size_t MatchBrace(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

// Python literals outside strings become JSON literals.
std::string NormalizeLiterals(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < s.size()) {
        out.push_back(s[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    auto word_at = [&](std::string_view w) {
      return s.substr(i, w.size()) == w &&
             (i + w.size() >= s.size() || !IsAsciiAlnum(s[i + w.size()])) &&
             (i == 0 || !IsAsciiAlnum(s[i - 1]));
    };
    if (word_at("None")) {
      out += "null";
      i += 3;
    } else if (word_at("True")) {
      out += "true";
      i += 3;
    } else if (word_at("False")) {
      out += "false";
      i += 4;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

bool LooksLikeReport(const nlohmann::json& j) {
  if (!j.is_object()) return false;
  if (j.contains("privacy_leakage_score")) return true;
  for (JudgeCategory c : kJudgeCategories) {
    if (j.contains(std::string(JudgeCategoryKey(c)))) return true;
  }
  return false;
}

std::optional<double> ScoreValue(const nlohmann::json& j,
                                 std::string_view key) {
  auto it = j.find(std::string(key));
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_number()) return it->get<double>();
  if (it->is_string()) {
    std::string s(Trim(it->get<std::string>()));
    if (s.empty() || s == "None" || s == "null" || s == "N/A") {
      return std::nullopt;
    }
    if (auto v = ParseNumber(s)) return v;
  }
  throw ValidationError("score for '" + std::string(key) +
                        "' is not a number");
}

}  // namespace

JudgeReport ReportFromJson(const nlohmann::json& j) {
  JudgeReport report;
  for (JudgeCategory c : kJudgeCategories) {
    report.at(c) = ScoreValue(j, JudgeCategoryKey(c));
  }
  report.reported_overall = ScoreValue(j, "privacy_leakage_score");
  if (auto it = j.find("explanation"); it != j.end() && it->is_string()) {
    report.explanation = it->get<std::string>();
  }
  ValidateReport(report);
  return report;
}

JudgeReport ParseReport(std::string_view raw) {
  for (std::size_t open = raw.find('{'); open != std::string_view::npos;
       open = raw.find('{', open + 1)) {
    const std::size_t close = MatchBrace(raw, open);
    if (close == std::string_view::npos) continue;
    nlohmann::json j = nlohmann::json::parse(
        NormalizeLiterals(raw.substr(open, close - open + 1)), nullptr,
        /*allow_exceptions=*/false);
    if (j.is_discarded() || !LooksLikeReport(j)) continue;
    return ReportFromJson(j);
  }
  throw ParseError("no judge report object found in model output",
                   std::string(raw));
}

nlohmann::json ReportToJson(const JudgeReport& report) {
  nlohmann::json j;
  j["privacy_leakage_score"] = report.overall;
  for (JudgeCategory c : kJudgeCategories) {
    const auto& v = report.at(c);
    j[std::string(JudgeCategoryKey(c))] =
        v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  }
  j["explanation"] = report.explanation;
  return j;
}

JudgeResult JudgeLeakage(std::string_view original, std::string_view answer,
                         GenerationClient& client) {
  JudgeResult result;
  const std::string prompt = BuildJudgePrompt(original, answer);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string request =
        attempt == 0 ? prompt : prompt + std::string(kJudgeFormatReminder);
    result.transcripts.push_back(client.Complete(request, kJudgeTemperature));
    try {
      result.report = ParseReport(result.transcripts.back());
      result.error.clear();
      return result;
    } catch (const ParseError& e) {
      result.error = e.what();
    } catch (const ValidationError& e) {
      result.error = e.what();
    }
  }
  return result;
}

}  // namespace anonrag
