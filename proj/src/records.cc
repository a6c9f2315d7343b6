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

#include "anonrag/records.h"

#include <cmath>
#include <filesystem>
#include <limits>

#include "anonrag/errors.h"
#include "anonrag/text_util.h"

namespace anonrag {

std::string_view PlacementName(Placement placement) {
  return placement == Placement::kPre ? "pre" : "post";
}

std::optional<Placement> ParsePlacement(std::string_view name) {
  if (name == "pre" || name == "PRE") return Placement::kPre;
  if (name == "post" || name == "POST") return Placement::kPost;
  return std::nullopt;
}

namespace {

nlohmann::json Optional(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> OptionalDouble(const nlohmann::json& j,
                                     const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

std::optional<std::string> OptionalString(const nlohmann::json& j,
                                          const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

TaskKind TaskFromJson(const nlohmann::json& j) {
  auto task = ParseTask(j.get<std::string>());
  if (!task) throw ParameterError("unknown task " + j.dump());
  return *task;
}

Placement PlacementFromJson(const nlohmann::json& j) {
  auto p = ParsePlacement(j.get<std::string>());
  if (!p) throw ParameterError("unknown placement " + j.dump());
  return *p;
}

std::string HeaderLine(std::string_view kind) {
  nlohmann::json header = {{"schema", "anonrag." + std::string(kind)},
                           {"version", kRecordSchemaVersion}};
  return header.dump() + "\n";
}

}  // namespace

nlohmann::json ToJson(const TradeOff& t) {
  return {{"value", t.infinite() ? nlohmann::json("inf") : nlohmann::json(t.value)},
          {"llmj", t.llmj},
          {"rl", t.rl},
          {"cs", t.cs}};
}

TradeOff TradeOffFromJson(const nlohmann::json& j) {
  TradeOff t;
  const auto& v = j.at("value");
  t.value = v.is_string() ? std::numeric_limits<double>::infinity()
                          : v.get<double>();
  t.llmj = j.at("llmj").get<double>();
  t.rl = j.at("rl").get<double>();
  t.cs = j.at("cs").get<double>();
  return t;
}

nlohmann::json ToJson(const AnswerRecord& r) {
  nlohmann::json context = nlohmann::json::array();
  for (const auto& c : r.context) {
    context.push_back({{"doc_id", c.doc_id},
                       {"variant", c.variant.ToString()},
                       {"chunk_index", c.chunk_index}});
  }
  return {{"run_id", r.run_id},
          {"doc_id", r.doc_id},
          {"variant", r.variant.ToString()},
          {"task", TaskName(r.task)},
          {"placement", PlacementName(r.placement)},
          {"answer_text", r.answer_text},
          {"timing_ms", r.timing_ms},
          {"source_text", r.source_text},
          {"context", context},
          {"skipped_reason", r.skipped_reason ? nlohmann::json(*r.skipped_reason)
                                              : nlohmann::json(nullptr)}};
}

AnswerRecord AnswerFromJson(const nlohmann::json& j) {
  AnswerRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.doc_id = j.at("doc_id").get<std::string>();
  r.variant = VariantTag::Parse(j.at("variant").get<std::string>());
  r.task = TaskFromJson(j.at("task"));
  r.placement = PlacementFromJson(j.at("placement"));
  r.answer_text = j.at("answer_text").get<std::string>();
  r.timing_ms = j.at("timing_ms").get<long long>();
  r.source_text = j.value("source_text", std::string());
  for (const auto& c : j.value("context", nlohmann::json::array())) {
    r.context.push_back({c.at("doc_id").get<std::string>(),
                         VariantTag::Parse(c.at("variant").get<std::string>()),
                         c.at("chunk_index").get<std::size_t>()});
  }
  r.skipped_reason = OptionalString(j, "skipped_reason");
  return r;
}

nlohmann::json ToJson(const ScoreRecord& r) {
  return {
      {"run_id", r.run_id},
      {"dataset", r.dataset},
      {"doc_id", r.doc_id},
      {"variant", r.variant.ToString()},
      {"task", TaskName(r.task)},
      {"placement", PlacementName(r.placement)},
      {"utility",
       {{"rouge_l", Optional(r.utility.rouge_l)},
        {"cosine", Optional(r.utility.cosine)},
        {"perplexity", Optional(r.utility.perplexity)}}},
      {"judge", r.judge ? ReportToJson(*r.judge) : nlohmann::json(nullptr)},
      {"judge_discrepancy", r.judge && r.judge->overall_discrepancy},
      {"judge_reported_overall",
       r.judge ? Optional(r.judge->reported_overall) : nlohmann::json(nullptr)},
      {"tradeoff", r.tradeoff ? ToJson(*r.tradeoff) : nlohmann::json(nullptr)},
      {"skipped_reason", r.skipped_reason ? nlohmann::json(*r.skipped_reason)
                                          : nlohmann::json(nullptr)},
  };
}

ScoreRecord ScoreFromJson(const nlohmann::json& j) {
  ScoreRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.dataset = j.value("dataset", std::string());
  r.doc_id = j.at("doc_id").get<std::string>();
  r.variant = VariantTag::Parse(j.at("variant").get<std::string>());
  r.task = TaskFromJson(j.at("task"));
  r.placement = PlacementFromJson(j.at("placement"));
  const auto& u = j.at("utility");
  r.utility.rouge_l = OptionalDouble(u, "rouge_l");
  r.utility.cosine = OptionalDouble(u, "cosine");
  r.utility.perplexity = OptionalDouble(u, "perplexity");
  if (!j.at("judge").is_null()) {
    r.judge = ReportFromJson(j["judge"]);
    r.judge->reported_overall = OptionalDouble(j, "judge_reported_overall");
    r.judge->overall_discrepancy = j.value("judge_discrepancy", false);
  }
  if (!j.at("tradeoff").is_null()) r.tradeoff = TradeOffFromJson(j["tradeoff"]);
  r.skipped_reason = OptionalString(j, "skipped_reason");
  return r;
}

LoadedLines LoadRecordLines(const std::string& path, std::string_view kind) {
  std::string data;
  try {
    data = ReadFile(path);
  } catch (const IngestError&) {
    throw StoreError("cannot read record file " + path, 0);
  }
  LoadedLines out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      out.remainder = data.substr(pos);
      break;
    }
    std::string_view line(data.data() + pos, nl - pos);
    nlohmann::json j =
        nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      throw StoreError("corrupt record in " + path, line_no);
    }
    if (line_no == 1) {
      if (j.value("schema", "") != "anonrag." + std::string(kind)) {
        throw StoreError("wrong record schema in " + path, 1);
      }
      if (j.value("version", 0) != kRecordSchemaVersion) {
        throw StoreError("unsupported record version in " + path, 1);
      }
    } else {
      out.records.push_back(std::move(j));
    }
    pos = nl + 1;
    out.complete_bytes = pos;
  }
  if (line_no == 0 || out.complete_bytes == 0) {
    throw StoreError("record file " + path + " lacks a header", 1);
  }
  return out;
}

RecordWriter::RecordWriter(const std::string& path, std::string_view kind) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(path, ec) && fs::file_size(path, ec) > 0) {
    LoadedLines loaded = LoadRecordLines(path, kind);
    if (loaded.remainder) fs::resize_file(path, loaded.complete_bytes);
    existing_ = std::move(loaded.records);
    out_.open(path, std::ios::binary | std::ios::app);
  } else {
    out_.open(path, std::ios::binary | std::ios::trunc);
    out_ << HeaderLine(kind);
    out_.flush();
  }
  if (!out_) throw StoreError("cannot open record file " + path, 0);
}

void RecordWriter::Append(const nlohmann::json& record) {
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw StoreError("write failed", 0);
}

void SaveAnswers(const std::vector<AnswerRecord>& records,
                 const std::string& path) {
  std::string data = HeaderLine("answers");
  for (const auto& r : records) data += ToJson(r).dump() + "\n";
  WriteFile(path, data);
}

std::vector<AnswerRecord> LoadAnswers(const std::string& path,
                                      std::optional<std::string>* remainder) {
  LoadedLines loaded = LoadRecordLines(path, "answers");
  if (remainder != nullptr) *remainder = loaded.remainder;
  std::vector<AnswerRecord> out;
  out.reserve(loaded.records.size());
  for (std::size_t i = 0; i < loaded.records.size(); ++i) {
    try {
      out.push_back(AnswerFromJson(loaded.records[i]));
    } catch (const std::exception& e) {
      throw StoreError(std::string("invalid answer record (") + e.what() + ")",
                       i + 2);
    }
  }
  return out;
}

void SaveScores(const std::vector<ScoreRecord>& records,
                const std::string& path) {
  std::string data = HeaderLine("scores");
  for (const auto& r : records) data += ToJson(r).dump() + "\n";
  WriteFile(path, data);
}

std::vector<ScoreRecord> LoadScores(const std::string& path) {
  LoadedLines loaded = LoadRecordLines(path, "scores");
  std::vector<ScoreRecord> out;
  out.reserve(loaded.records.size());
  for (std::size_t i = 0; i < loaded.records.size(); ++i) {
    try {
      out.push_back(ScoreFromJson(loaded.records[i]));
    } catch (const std::exception& e) {
      throw StoreError(std::string("invalid score record (") + e.what() + ")",
                       i + 2);
    }
  }
  return out;
}

}  // namespace anonrag
