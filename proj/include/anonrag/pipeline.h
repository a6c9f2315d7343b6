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

#ifndef ANONRAG_PIPELINE_H_
#define ANONRAG_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anonrag/clients.h"
#include "anonrag/corpus.h"
#include "anonrag/dp.h"
#include "anonrag/pii.h"
#include "anonrag/rag.h"
#include "anonrag/records.h"
#include "json.hpp"

namespace anonrag {

// Non-owning client bundle. Optional members may be null; methods that
// need a missing one produce skipped records.
struct Services {
  EmbeddingClient* embedder = nullptr;           // chunk and query vectors
  GenerationClient* generator = nullptr;         // answers, synthesis, DP-Prompt
  GenerationClient* judge = nullptr;
  EmbeddingClient* sentence_embedder = nullptr;  // cosine utility
  NllScorer* scorer = nullptr;
  RewriterClient* dp_mlm = nullptr;
  const PiiDetector* detector = nullptr;
  const EmbeddingLexicon* lexicon = nullptr;
  const DiffractorLists* lists = nullptr;

  void Validate() const;
};

struct RunConfig {
  std::string run_id = "run";
  Placement placement = Placement::kPre;
  std::vector<VariantTag> methods;
  std::vector<TaskKind> tasks = {TaskKind::kSummarize, TaskKind::kDetectPii};
  std::uint64_t seed = 0;
  std::size_t concurrency = 4;
  std::size_t chunk_chars = kDefaultChunkChars;
  std::size_t top_k = 2;
  double clip_low = -50;
  double clip_high = 50;

  // Stop once the record file holds this many records (simulated crash).
  std::optional<std::size_t> stop_after;
  // Milliseconds; defaults to a steady clock.
  std::function<long long()> clock_ms;

  void Validate() const;
  nlohmann::json ToJson() const;
  static RunConfig FromJson(const nlohmann::json& j);
};

// Produces one anonymized rewrite of a text.
class Anonymizer {
 public:
  Anonymizer(const Services& services, double clip_low = -50,
             double clip_high = 50)
      : services_(services), clip_low_(clip_low), clip_high_(clip_high) {}

  std::string Apply(std::string_view text, const VariantTag& tag,
                    std::uint64_t seed) const;

 private:
  const Services& services_;
  double clip_low_;
  double clip_high_;
};

// Seed for one randomized rewrite, stable across runs and thread schedules.
std::uint64_t VariantSeed(std::uint64_t run_seed, std::string_view doc_id,
                          const VariantTag& tag, std::string_view extra = {});

// Variants of one run in emission order: original plus methods, sorted by
// canonical tag.
std::vector<VariantTag> RunVariants(const RunConfig& cfg);

struct RunOutcome {
  std::vector<AnswerRecord> records;  // canonical order
  bool complete = true;
  std::size_t resumed = 0;  // records found already on disk
};

// Runs PRE or POST per cfg.placement. With a non-empty records_path the
// records are appended there and an existing file is resumed. A
// TransportError aborts the run after flushing every record that precedes
// the failure in canonical order.
RunOutcome RunExperiment(const RunConfig& cfg, const DatasetManifest& dataset,
                         const Services& services,
                         const std::string& records_path = {});

RunOutcome RunPre(const RunConfig& cfg, const DatasetManifest& dataset,
                  const Services& services,
                  const std::string& records_path = {});
RunOutcome RunPost(const RunConfig& cfg, const DatasetManifest& dataset,
                   const Services& services,
                   const std::string& records_path = {});

struct JudgeTranscript {
  std::string doc_id;
  VariantTag variant;
  std::vector<std::string> exchanges;
  std::string error;
};

struct EvaluationOutcome {
  std::vector<ScoreRecord> scores;  // same order as the answers
  std::vector<JudgeTranscript> transcripts;
};

EvaluationOutcome Evaluate(const std::vector<AnswerRecord>& answers,
                           const DatasetManifest& dataset,
                           const Services& services,
                           std::size_t concurrency = 4);

// Run directory layout.
struct RunPaths {
  std::string dir;
  std::string config() const { return dir + "/run.json"; }
  std::string manifest() const { return dir + "/manifest.json"; }
  std::string answers() const { return dir + "/answers.jsonl"; }
  std::string scores() const { return dir + "/scores.jsonl"; }
  std::string judge() const { return dir + "/judge.jsonl"; }
};

// Creates (or resumes) a run directory and runs the experiment. Resuming
// with a different configuration throws ParameterError.
RunOutcome RunToDirectory(const RunConfig& cfg, const DatasetManifest& dataset,
                          const Services& services, const std::string& dir);

// Scores a run directory's answers and writes scores.jsonl and judge.jsonl.
EvaluationOutcome EvaluateDirectory(const std::string& dir,
                                    const Services& services,
                                    std::size_t concurrency = 4);

}  // namespace anonrag

#endif  // ANONRAG_PIPELINE_H_
