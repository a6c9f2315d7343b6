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

#include "anonrag/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>
#include <tuple>
#include <variant>

#include "anonrag/errors.h"
#include "anonrag/judge.h"
#include "anonrag/metrics.h"
#include "anonrag/text_util.h"

namespace anonrag {

namespace {

// Runs fn(i) for i in [0, n) on up to `limit` threads. Exceptions are
// stored per index.
std::vector<std::exception_ptr> ParallelFor(
    std::size_t n, std::size_t limit,
    const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(limit, 1), n);
  if (threads <= 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return errors;
}

long long SteadyMillis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::function<long long()> ClockOf(const RunConfig& cfg) {
  return cfg.clock_ms ? cfg.clock_ms : std::function<long long()>(SteadyMillis);
}

using RecordKey = std::tuple<std::string, std::string, int>;

// Every record of one document, or the error that stopped it.
struct Slot {
  std::optional<AnswerRecord> record;
  std::exception_ptr error;
};

bool IsTransport(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const TransportError&) {
    return true;
  } catch (const EmbeddingError& e) {
    return e.transport();
  } catch (...) {
    return false;
  }
}

// Non-transport failures become skip reasons; transport failures escape.
std::string SkipReason(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const TransportError&) {
    throw;
  } catch (const EmbeddingError& ex) {
    if (ex.transport()) throw;
    return ex.what();
  } catch (const MethodUnavailable& ex) {
    return std::string("method unavailable: ") + ex.what();
  } catch (const std::exception& ex) {
    return ex.what();
  }
}

class Emitter {
 public:
  Emitter(const RunConfig& cfg, const std::string& path) : cfg_(cfg) {
    if (path.empty()) return;
    writer_.emplace(path, "answers");
    for (const auto& j : writer_->existing_records()) {
      AnswerRecord r = AnswerFromJson(j);
      if (r.run_id != cfg.run_id) {
        throw ParameterError("record file belongs to run " + r.run_id);
      }
      done_.insert(r.SortKey());
      outcome_.records.push_back(std::move(r));
    }
    outcome_.resumed = outcome_.records.size();
  }

  bool Done(const RecordKey& key) const { return done_.count(key) > 0; }

  // False once the simulated interruption point is reached.
  bool Emit(AnswerRecord record) {
    if (Done(record.SortKey())) return true;
    if (cfg_.stop_after && outcome_.records.size() >= *cfg_.stop_after) {
      outcome_.complete = false;
      return false;
    }
    if (writer_) writer_->Append(ToJson(record));
    done_.insert(record.SortKey());
    outcome_.records.push_back(std::move(record));
    return true;
  }

  // Emits slots in order; rethrows the first transport failure after
  // emitting everything before it.
  bool EmitAll(std::vector<Slot>& slots) {
    for (auto& slot : slots) {
      if (slot.error) std::rethrow_exception(slot.error);
      if (!Emit(std::move(*slot.record))) return false;
    }
    return true;
  }

  RunOutcome Finish() {
    std::sort(outcome_.records.begin(), outcome_.records.end(),
              [](const AnswerRecord& a, const AnswerRecord& b) {
                return a.SortKey() < b.SortKey();
              });
    return std::move(outcome_);
  }

 private:
  const RunConfig& cfg_;
  std::optional<RecordWriter> writer_;
  std::set<RecordKey> done_;
  RunOutcome outcome_;
};

AnswerRecord BaseRecord(const RunConfig& cfg, const std::string& doc_id,
                        const VariantTag& tag, TaskKind task) {
  AnswerRecord r;
  r.run_id = cfg.run_id;
  r.doc_id = doc_id;
  r.variant = tag;
  r.task = task;
  r.placement = cfg.placement;
  return r;
}

bool DocumentDone(const Emitter& emitter, const std::string& doc_id,
                  const std::vector<VariantTag>& variants,
                  const std::vector<TaskKind>& tasks) {
  for (const auto& v : variants) {
    for (TaskKind t : tasks) {
      if (!emitter.Done({doc_id, v.ToString(), static_cast<int>(t)})) {
        return false;
      }
    }
  }
  return true;
}

struct Retrieved {
  std::vector<std::string> chunks;  // chunk order
  std::vector<ContextRef> context;
};

Retrieved Retrieve(const VectorIndex& index, const Vector& query,
                   const std::string& doc_id, const VariantTag& tag,
                   std::size_t k) {
  std::vector<ScoredEntry> hits = index.Query(query, doc_id, tag, k);
  std::sort(hits.begin(), hits.end(),
            [](const ScoredEntry& a, const ScoredEntry& b) {
              return a.entry.chunk_index < b.entry.chunk_index;
            });
  Retrieved out;
  for (const auto& h : hits) {
    out.chunks.push_back(h.entry.text);
    out.context.push_back(
        {h.entry.doc_id, h.entry.variant, h.entry.chunk_index});
  }
  return out;
}

void IndexText(VectorIndex& index, const std::string& doc_id,
               const VariantTag& tag, const std::string& text,
               std::size_t chunk_chars, EmbeddingClient& embedder) {
  std::vector<Chunk> chunks =
      ChunkDocument(Document::Make(doc_id, "", text), chunk_chars);
  if (chunks.empty()) throw GenerationError("variant text is empty");
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& c : chunks) texts.push_back(c.text);
  std::vector<Vector> vectors = Embed(texts, embedder);
  std::vector<IndexEntry> entries;
  entries.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    entries.push_back({std::move(vectors[i]), doc_id, tag, chunks[i].index,
                       std::move(chunks[i].text)});
  }
  index.Upsert(std::move(entries));
}

std::map<TaskKind, Vector> QueryVectors(const RunConfig& cfg,
                                        EmbeddingClient& embedder) {
  std::vector<std::string> texts;
  for (TaskKind t : cfg.tasks) texts.emplace_back(RetrievalQueryText(t));
  std::vector<Vector> vectors = Embed(texts, embedder);
  std::map<TaskKind, Vector> out;
  for (std::size_t i = 0; i < cfg.tasks.size(); ++i) {
    out[cfg.tasks[i]] = std::move(vectors[i]);
  }
  return out;
}

}  // namespace

void Services::Validate() const {
  if (embedder == nullptr || generator == nullptr || detector == nullptr) {
    throw ParameterError(
        "services need an embedder, a generator and a PII detector");
  }
}

void RunConfig::Validate() const {
  if (run_id.empty()) throw ParameterError("run id must not be empty");
  if (methods.empty()) throw ParameterError("methods must not be empty");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (m.is_original()) {
      throw ParameterError("methods must not include original");
    }
    if (!seen.insert(m.ToString()).second) {
      throw ParameterError("duplicate method " + m.ToString());
    }
  }
  if (tasks.empty()) throw ParameterError("tasks must not be empty");
  std::set<TaskKind> task_set(tasks.begin(), tasks.end());
  if (task_set.size() != tasks.size()) {
    throw ParameterError("duplicate task");
  }
  if (concurrency == 0) throw ParameterError("concurrency must be positive");
  if (top_k == 0) throw ParameterError("top_k must be positive");
  if (chunk_chars == 0) throw ParameterError("chunk size must be positive");
  if (!(clip_low < clip_high)) {
    throw ParameterError("clip bounds must satisfy low < high");
  }
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json methods_json = nlohmann::json::array();
  for (const auto& m : methods) methods_json.push_back(m.ToString());
  nlohmann::json tasks_json = nlohmann::json::array();
  for (TaskKind t : tasks) tasks_json.push_back(TaskName(t));
  return {{"run_id", run_id},
          {"placement", PlacementName(placement)},
          {"methods", methods_json},
          {"tasks", tasks_json},
          {"seed", seed},
          {"concurrency", concurrency},
          {"chunk_chars", chunk_chars},
          {"top_k", top_k},
          {"clip_low", clip_low},
          {"clip_high", clip_high}};
}

RunConfig RunConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("run config must be an object");
  RunConfig cfg;
  try {
    cfg.run_id = j.value("run_id", cfg.run_id);
    if (j.contains("placement")) {
      auto p = ParsePlacement(j["placement"].get<std::string>());
      if (!p) throw ParameterError("placement must be pre or post");
      cfg.placement = *p;
    }
    if (!j.contains("methods") || !j["methods"].is_array()) {
      throw ParameterError("methods must be a list of variant tags");
    }
    for (const auto& m : j["methods"]) {
      cfg.methods.push_back(VariantTag::Parse(m.get<std::string>()));
    }
    if (j.contains("tasks")) {
      cfg.tasks.clear();
      for (const auto& t : j["tasks"]) {
        auto task = ParseTask(t.get<std::string>());
        if (!task) throw ParameterError("unknown task " + t.dump());
        cfg.tasks.push_back(*task);
      }
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.concurrency = j.value("concurrency", cfg.concurrency);
    cfg.chunk_chars = j.value("chunk_chars", cfg.chunk_chars);
    cfg.top_k = j.value("top_k", cfg.top_k);
    cfg.clip_low = j.value("clip_low", cfg.clip_low);
    cfg.clip_high = j.value("clip_high", cfg.clip_high);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed run config: ") + e.what());
  }
  return cfg;
}

std::string Anonymizer::Apply(std::string_view text, const VariantTag& tag,
                              std::uint64_t seed) const {
  const PiiDetector* detector = services_.detector;
  auto need_detector = [&] {
    if (detector == nullptr) throw MethodUnavailable("no PII detector");
  };
  RewriterConfig rewriter;
  rewriter.clip_low = clip_low_;
  rewriter.clip_high = clip_high_;
  if (tag.epsilon) rewriter.epsilon = PrivacyBudget::PerDocument(*tag.epsilon);
  switch (tag.method) {
    case Method::kOriginal:
      return std::string(text);
    case Method::kPiiDelete:
      need_detector();
      return DeleteEntities(text, detector->Detect(text));
    case Method::kPiiLabel:
      need_detector();
      return LabelEntities(text, detector->Detect(text));
    case Method::kPiiSynthetic: {
      need_detector();
      if (services_.generator == nullptr) {
        throw MethodUnavailable("no generation client for synthesis");
      }
      return Synthesize(LabelEntities(text, detector->Detect(text)),
                        *services_.generator);
    }
    case Method::kDiffractor: {
      if (services_.lexicon == nullptr || services_.lists == nullptr) {
        throw MethodUnavailable("no embedding lexicon for 1-Diffractor");
      }
      Rng rng(seed);
      return ObfuscateText(text, PrivacyBudget::PerWord(*tag.epsilon),
                           *services_.lists, *services_.lexicon, rng);
    }
    case Method::kDpPrompt:
      if (services_.generator == nullptr) {
        throw MethodUnavailable("no generation client for DP-Prompt");
      }
      return DpPromptRewrite(text, rewriter, *services_.generator);
    case Method::kDpMlm:
      return DpMlmRewrite(text, rewriter, services_.dp_mlm);
  }
  throw ParameterError("unknown method");
}

std::uint64_t VariantSeed(std::uint64_t run_seed, std::string_view doc_id,
                          const VariantTag& tag, std::string_view extra) {
  std::string key(doc_id);
  key += '\x1f';
  key += tag.ToString();
  key += '\x1f';
  key += extra;
  return DeriveSeed(run_seed, key);
}

std::vector<VariantTag> RunVariants(const RunConfig& cfg) {
  std::vector<VariantTag> variants = cfg.methods;
  variants.push_back(VariantTag::Original());
  std::sort(variants.begin(), variants.end());
  variants.erase(std::unique(variants.begin(), variants.end()),
                 variants.end());
  return variants;
}

RunOutcome RunPre(const RunConfig& cfg, const DatasetManifest& dataset,
                  const Services& services, const std::string& records_path) {
  cfg.Validate();
  services.Validate();
  const auto clock = ClockOf(cfg);
  const std::vector<VariantTag> variants = RunVariants(cfg);
  const Anonymizer anonymizer(services, cfg.clip_low, cfg.clip_high);
  Emitter emitter(cfg, records_path);
  VectorIndex index;
  std::optional<std::map<TaskKind, Vector>> queries;

  for (const Document& doc : dataset.documents) {
    if (DocumentDone(emitter, doc.id, variants, cfg.tasks)) continue;
    if (!queries) queries = QueryVectors(cfg, *services.embedder);

    // Anonymize and index every variant of the document.
    std::vector<std::string> texts(variants.size());
    std::vector<long long> prep_ms(variants.size(), 0);
    std::vector<std::exception_ptr> variant_errors = ParallelFor(
        variants.size(), cfg.concurrency, [&](std::size_t i) {
          const long long t0 = clock();
          texts[i] = anonymizer.Apply(doc.text, variants[i],
                                      VariantSeed(cfg.seed, doc.id,
                                                  variants[i]));
          IndexText(index, doc.id, variants[i], texts[i], cfg.chunk_chars,
                    *services.embedder);
          prep_ms[i] = clock() - t0;
        });

    // Answer every (variant, task) from its own filtered retrieval.
    const std::size_t n_tasks = cfg.tasks.size();
    std::vector<Slot> slots(variants.size() * n_tasks);
    std::vector<std::exception_ptr> answer_errors = ParallelFor(
        slots.size(), cfg.concurrency, [&](std::size_t s) {
          const std::size_t vi = s / n_tasks;
          const TaskKind task = cfg.tasks[s % n_tasks];
          AnswerRecord r = BaseRecord(cfg, doc.id, variants[vi], task);
          if (variant_errors[vi]) {
            if (IsTransport(variant_errors[vi])) {
              slots[s].error = variant_errors[vi];
              return;
            }
            r.skipped_reason = SkipReason(variant_errors[vi]);
            slots[s].record = std::move(r);
            return;
          }
          r.source_text = texts[vi];
          const long long t0 = clock();
          try {
            Retrieved ctx = Retrieve(index, queries->at(task), doc.id,
                                     variants[vi], cfg.top_k);
            r.context = std::move(ctx.context);
            r.answer_text = GenerateAnswer(task, ctx.chunks,
                                           *services.generator);
          } catch (const TransportError&) {
            slots[s].error = std::current_exception();
            return;
          } catch (const Error& e) {
            r.answer_text.clear();
            r.skipped_reason = e.what();
          }
          r.timing_ms = prep_ms[vi] + (clock() - t0);
          slots[s].record = std::move(r);
        });
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (answer_errors[s]) slots[s].error = answer_errors[s];
    }
    if (!emitter.EmitAll(slots)) break;
  }
  return emitter.Finish();
}

RunOutcome RunPost(const RunConfig& cfg, const DatasetManifest& dataset,
                   const Services& services,
                   const std::string& records_path) {
  cfg.Validate();
  services.Validate();
  const auto clock = ClockOf(cfg);
  const std::vector<VariantTag> variants = RunVariants(cfg);
  const Anonymizer anonymizer(services, cfg.clip_low, cfg.clip_high);
  const VariantTag original = VariantTag::Original();
  Emitter emitter(cfg, records_path);
  VectorIndex index;
  std::optional<std::map<TaskKind, Vector>> queries;

  for (const Document& doc : dataset.documents) {
    if (DocumentDone(emitter, doc.id, variants, cfg.tasks)) continue;
    if (!queries) queries = QueryVectors(cfg, *services.embedder);

    // Base answers come from the original document only.
    const std::size_t n_tasks = cfg.tasks.size();
    std::vector<std::string> base(n_tasks);
    std::vector<Retrieved> base_ctx(n_tasks);
    std::vector<long long> base_ms(n_tasks, 0);
    std::exception_ptr index_error;
    try {
      IndexText(index, doc.id, original, doc.text, cfg.chunk_chars,
                *services.embedder);
    } catch (const TransportError&) {
      throw;
    } catch (const Error&) {
      index_error = std::current_exception();
    }
    std::vector<std::exception_ptr> base_errors(n_tasks, index_error);
    if (!index_error) {
      base_errors = ParallelFor(n_tasks, cfg.concurrency, [&](std::size_t t) {
        const long long t0 = clock();
        base_ctx[t] = Retrieve(index, queries->at(cfg.tasks[t]), doc.id,
                               original, cfg.top_k);
        base[t] = GenerateAnswer(cfg.tasks[t], base_ctx[t].chunks,
                                 *services.generator);
        base_ms[t] = clock() - t0;
      });
    }

    std::vector<Slot> slots(variants.size() * n_tasks);
    std::vector<std::exception_ptr> errors = ParallelFor(
        slots.size(), cfg.concurrency, [&](std::size_t s) {
          const VariantTag& tag = variants[s / n_tasks];
          const std::size_t t = s % n_tasks;
          const TaskKind task = cfg.tasks[t];
          AnswerRecord r = BaseRecord(cfg, doc.id, tag, task);
          if (base_errors[t]) {
            if (IsTransport(base_errors[t])) {
              slots[s].error = base_errors[t];
              return;
            }
            r.skipped_reason = SkipReason(base_errors[t]);
            slots[s].record = std::move(r);
            return;
          }
          r.source_text = base[t];
          r.context = base_ctx[t].context;
          const long long t0 = clock();
          try {
            r.answer_text = anonymizer.Apply(
                base[t], tag,
                VariantSeed(cfg.seed, doc.id, tag, TaskName(task)));
          } catch (const TransportError&) {
            slots[s].error = std::current_exception();
            return;
          } catch (const Error& e) {
            r.answer_text.clear();
            r.skipped_reason = e.what();
          }
          r.timing_ms = base_ms[t] + (clock() - t0);
          slots[s].record = std::move(r);
        });
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (errors[s]) slots[s].error = errors[s];
    }
    if (!emitter.EmitAll(slots)) break;
  }
  return emitter.Finish();
}

RunOutcome RunExperiment(const RunConfig& cfg, const DatasetManifest& dataset,
                         const Services& services,
                         const std::string& records_path) {
  return cfg.placement == Placement::kPre
             ? RunPre(cfg, dataset, services, records_path)
             : RunPost(cfg, dataset, services, records_path);
}

EvaluationOutcome Evaluate(const std::vector<AnswerRecord>& answers,
                           const DatasetManifest& dataset,
                           const Services& services,
                           std::size_t concurrency) {
  if (services.judge == nullptr || services.sentence_embedder == nullptr) {
    throw ParameterError("evaluation needs a judge and a sentence embedder");
  }
  using PairKey = std::pair<std::string, std::string>;  // doc, variant
  std::map<std::string, const AnswerRecord*> references;
  for (const auto& a : answers) {
    if (a.variant.is_original() && a.task == TaskKind::kSummarize &&
        !a.skipped_reason) {
      references[a.doc_id] = &a;
    }
  }

  // Sentence embeddings for every distinct non-empty summary.
  std::map<std::string, Vector> sentence_vectors;
  {
    std::vector<std::string> texts;
    std::set<std::string> seen;
    auto add = [&](const std::string& t) {
      if (!t.empty() && seen.insert(t).second) texts.push_back(t);
    };
    for (const auto& a : answers) {
      if (a.task != TaskKind::kSummarize || a.skipped_reason) continue;
      if (references.count(a.doc_id) == 0) continue;
      add(a.answer_text);
      add(references[a.doc_id]->answer_text);
    }
    if (!texts.empty()) {
      std::vector<Vector> vectors = Embed(texts, *services.sentence_embedder);
      for (std::size_t i = 0; i < texts.size(); ++i) {
        sentence_vectors[texts[i]] = std::move(vectors[i]);
      }
    }
  }

  EvaluationOutcome out;
  out.scores.resize(answers.size());
  std::vector<std::optional<JudgeTranscript>> transcripts(answers.size());
  std::vector<std::exception_ptr> errors = ParallelFor(
      answers.size(), concurrency, [&](std::size_t i) {
        const AnswerRecord& a = answers[i];
        ScoreRecord& s = out.scores[i];
        s.run_id = a.run_id;
        s.dataset = dataset.name;
        s.doc_id = a.doc_id;
        s.variant = a.variant;
        s.task = a.task;
        s.placement = a.placement;
        if (a.skipped_reason) {
          s.skipped_reason = "answer skipped: " + *a.skipped_reason;
          return;
        }
        if (a.task == TaskKind::kSummarize) {
          auto ref = references.find(a.doc_id);
          if (ref == references.end()) {
            s.skipped_reason = "missing original-variant reference";
            return;
          }
          const std::string& reference = ref->second->answer_text;
          s.utility.rouge_l = RougeL(a.answer_text, reference);
          if (a.answer_text.empty() || reference.empty()) {
            s.utility.cosine = 0.0;
          } else {
            s.utility.cosine = CosineSim(sentence_vectors.at(a.answer_text),
                                         sentence_vectors.at(reference));
          }
          if (services.scorer != nullptr) {
            try {
              s.utility.perplexity = Perplexity(a.answer_text,
                                                *services.scorer);
            } catch (const ParameterError&) {
              // No scorable tokens: perplexity stays absent.
            }
          }
          return;
        }
        const Document* doc = dataset.Find(a.doc_id);
        if (doc == nullptr) {
          s.skipped_reason = "document not in dataset";
          return;
        }
        if (Trim(a.answer_text).empty()) {
          s.skipped_reason = "empty answer";
          return;
        }
        JudgeResult jr = JudgeLeakage(doc->text, a.answer_text,
                                      *services.judge);
        transcripts[i] = JudgeTranscript{a.doc_id, a.variant,
                                         std::move(jr.transcripts), jr.error};
        if (jr.report) {
          s.judge = std::move(jr.report);
        } else {
          s.skipped_reason = "judge failed: " + jr.error;
        }
      });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& t : transcripts) {
    if (t) out.transcripts.push_back(std::move(*t));
  }

  // Join the two tasks per (doc, variant).
  std::map<PairKey, std::pair<ScoreRecord*, ScoreRecord*>> pairs;
  for (auto& s : out.scores) {
    auto& p = pairs[{s.doc_id, s.variant.ToString()}];
    (s.task == TaskKind::kSummarize ? p.first : p.second) = &s;
  }
  for (auto& [key, p] : pairs) {
    auto [sum, det] = p;
    if (sum == nullptr || det == nullptr) continue;
    if (!sum->utility.rouge_l || !sum->utility.cosine || !det->judge) continue;
    TradeOff to = ComputeTradeOff(*sum->utility.rouge_l,
                                  std::clamp(*sum->utility.cosine, -1.0, 1.0),
                                  det->judge->overall);
    sum->tradeoff = to;
    det->tradeoff = to;
  }
  return out;
}

RunOutcome RunToDirectory(const RunConfig& cfg, const DatasetManifest& dataset,
                          const Services& services, const std::string& dir) {
  namespace fs = std::filesystem;
  cfg.Validate();
  const RunPaths paths{dir};
  fs::create_directories(dir);
  const nlohmann::json config = cfg.ToJson();
  if (fs::exists(paths.config())) {
    nlohmann::json stored;
    try {
      stored = nlohmann::json::parse(ReadFile(paths.config()));
    } catch (const nlohmann::json::exception& e) {
      throw StoreError(std::string("corrupt run config: ") + e.what(), 0);
    }
    if (stored != config) {
      throw ParameterError("run directory " + dir +
                           " holds a run with a different configuration");
    }
  } else {
    WriteFile(paths.config(), config.dump(2) + "\n");
    SaveManifest(dataset, paths.manifest());
  }
  return RunExperiment(cfg, dataset, services, paths.answers());
}

EvaluationOutcome EvaluateDirectory(const std::string& dir,
                                    const Services& services,
                                    std::size_t concurrency) {
  const RunPaths paths{dir};
  DatasetManifest dataset = LoadManifest(paths.manifest());
  std::vector<AnswerRecord> answers = LoadAnswers(paths.answers());
  EvaluationOutcome out = Evaluate(answers, dataset, services, concurrency);
  SaveScores(out.scores, paths.scores());
  std::string judge_log;
  for (const auto& t : out.transcripts) {
    nlohmann::json j = {{"doc_id", t.doc_id},
                        {"variant", t.variant.ToString()},
                        {"exchanges", t.exchanges},
                        {"error", t.error}};
    judge_log += j.dump() + "\n";
  }
  WriteFile(paths.judge(), judge_log);
  return out;
}

}  // namespace anonrag
