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

#include "cli.h"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anonrag/clients.h"
#include "anonrag/corpus.h"
#include "anonrag/dp.h"
#include "anonrag/errors.h"
#include "anonrag/metrics.h"
#include "anonrag/mocks.h"
#include "anonrag/pii.h"
#include "anonrag/pipeline.h"
#include "anonrag/rag.h"
#include "anonrag/records.h"
#include "anonrag/report.h"
#include "anonrag/server.h"
#include "anonrag/text_util.h"
#include "json.hpp"

namespace anonrag::cli {

namespace {

// Endpoint environment variables.
constexpr const char* kGenUrl = "ANONRAG_GEN_URL";
constexpr const char* kGenModel = "ANONRAG_GEN_MODEL";
constexpr const char* kJudgeModel = "ANONRAG_JUDGE_MODEL";
constexpr const char* kEmbedUrl = "ANONRAG_EMBED_URL";
constexpr const char* kEmbedModel = "ANONRAG_EMBED_MODEL";
constexpr const char* kSentenceModel = "ANONRAG_SENTENCE_MODEL";
constexpr const char* kDpMlmUrl = "ANONRAG_DPMLM_URL";
constexpr const char* kNllUrl = "ANONRAG_NLL_URL";

struct BackendOptions {
  std::string backend = "auto";  // auto, mock, http
  std::string gazetteers;
  std::string lexicon;
  std::size_t num_lists = kDefaultNumLists;
  std::uint64_t lists_seed = 0;
};

void AddBackendOptions(CLI::App* app, BackendOptions& o) {
  app->add_option("--backend", o.backend,
                  "mock, http, or auto (http when " + std::string(kGenUrl) +
                      " is set)")
      ->check(CLI::IsMember({"auto", "mock", "http"}));
  app->add_option("--gazetteers", o.gazetteers,
                  "directory with persons.txt, locations.txt, ...");
  app->add_option("--lexicon", o.lexicon,
                  "word vectors (GloVe text format) for 1-Diffractor");
  app->add_option("--num-lists", o.num_lists, "1-Diffractor list count");
  app->add_option("--lists-seed", o.lists_seed,
                  "seed for the 1-Diffractor list directions");
}

class Backend {
 public:
  Backend(const BackendOptions& o, const std::vector<std::string>& corpus) {
    Gazetteer gazetteer;
    if (!o.gazetteers.empty()) gazetteer = Gazetteer::LoadDirectory(o.gazetteers);
    detector_ = std::make_unique<PiiDetector>(std::move(gazetteer));
    if (!o.lexicon.empty()) {
      lexicon_ = std::make_unique<EmbeddingLexicon>(
          EmbeddingLexicon::Load(o.lexicon));
      lists_ = std::make_unique<DiffractorLists>(
          BuildLists(*lexicon_, o.num_lists, o.lists_seed));
    }
    mock_ = o.backend == "mock" ||
            (o.backend == "auto" && std::getenv(kGenUrl) == nullptr);
    if (mock_) {
      auto gen = std::make_unique<MockGenerationClient>(*detector_);
      embedder_ = std::make_unique<HashEmbeddingClient>();
      sentence_ = std::make_unique<HashEmbeddingClient>(64, 1);
      generator_ = std::move(gen);
      judge_ = std::make_unique<MockGenerationClient>(*detector_);
      dp_mlm_ = std::make_unique<MockRewriterClient>();
      scorer_ = std::make_unique<UnigramNllScorer>(corpus);
      return;
    }
    auto gen = EndpointFromEnvironment(kGenUrl, kGenModel, "gpt-4o-mini");
    auto embed = EndpointFromEnvironment(kEmbedUrl, kEmbedModel,
                                         "text-embedding-3-small");
    if (!gen || !embed) {
      throw ConfigurationError(std::string("http backend needs ") + kGenUrl +
                               " and " + kEmbedUrl);
    }
    generator_ = std::make_unique<OpenAiGenerationClient>(*gen);
    auto judge = *gen;
    if (const char* m = std::getenv(kJudgeModel)) judge.model = m;
    judge_ = std::make_unique<OpenAiGenerationClient>(judge);
    embedder_ = std::make_unique<OpenAiEmbeddingClient>(*embed);
    auto sentence = *embed;
    if (const char* m = std::getenv(kSentenceModel)) sentence.model = m;
    sentence_ = std::make_unique<OpenAiEmbeddingClient>(sentence);
    if (auto dp = EndpointFromEnvironment(kDpMlmUrl, "", "")) {
      dp_mlm_ = std::make_unique<HttpRewriterClient>(*dp);
    }
    if (auto nll = EndpointFromEnvironment(kNllUrl, "", "")) {
      scorer_ = std::make_unique<HttpNllScorer>(*nll);
    } else {
      scorer_ = std::make_unique<UnigramNllScorer>(corpus);
    }
  }

  Services services() const {
    Services s;
    s.embedder = embedder_.get();
    s.generator = generator_.get();
    s.judge = judge_.get();
    s.sentence_embedder = sentence_.get();
    s.scorer = scorer_.get();
    s.dp_mlm = dp_mlm_.get();
    s.detector = detector_.get();
    s.lexicon = lexicon_.get();
    s.lists = lists_.get();
    return s;
  }
  bool mock() const { return mock_; }
  const PiiDetector& detector() const { return *detector_; }

 private:
  bool mock_ = true;
  std::unique_ptr<PiiDetector> detector_;
  std::unique_ptr<EmbeddingLexicon> lexicon_;
  std::unique_ptr<DiffractorLists> lists_;
  std::unique_ptr<EmbeddingClient> embedder_;
  std::unique_ptr<EmbeddingClient> sentence_;
  std::unique_ptr<GenerationClient> generator_;
  std::unique_ptr<GenerationClient> judge_;
  std::unique_ptr<RewriterClient> dp_mlm_;
  std::unique_ptr<NllScorer> scorer_;
};

std::vector<std::string> CorpusTexts(const DatasetManifest& m) {
  std::vector<std::string> out;
  for (const auto& d : m.documents) out.push_back(d.text);
  return out;
}

std::string ReadInput(const std::string& path) {
  if (!path.empty() && path != "-") return ReadFile(path);
  return std::string(std::istreambuf_iterator<char>(std::cin), {});
}

void WriteOutput(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
  } else {
    WriteFile(path, data);
  }
}

Method ParseMethodLoose(std::string name) {
  for (char& c : name) {
    if (c == '-') c = '_';
  }
  if (name == "diffractor" || name == "1_diffractor") return Method::kDiffractor;
  if (auto m = ParseMethod(name)) return *m;
  throw ParameterError("unknown method " + name);
}

std::vector<double> GridFor(Method m) {
  switch (m) {
    case Method::kDiffractor:
      return {kDiffractorEpsilons.begin(), kDiffractorEpsilons.end()};
    case Method::kDpPrompt:
      return {kDpPromptEpsilons.begin(), kDpPromptEpsilons.end()};
    case Method::kDpMlm:
      return {kDpMlmEpsilons.begin(), kDpMlmEpsilons.end()};
    default:
      return {};
  }
}

// Items are full tags ("diffractor@1"), method names, or "all". DP methods
// given by name take every --epsilon value, or their grid when none given.
std::vector<VariantTag> ParseMethodList(const std::vector<std::string>& items,
                                        const std::vector<double>& epsilons) {
  std::vector<VariantTag> out;
  for (const auto& item : items) {
    if (item == "all" || item == "grid") {
      for (const auto& t : FullGrid()) out.push_back(t);
      continue;
    }
    if (item.find('@') != std::string::npos) {
      const auto at = item.find('@');
      Method m = ParseMethodLoose(item.substr(0, at));
      auto eps = ParseNumber(item.substr(at + 1));
      if (!eps) throw ParameterError("bad epsilon in " + item);
      out.push_back(VariantTag::Make(m, *eps));
      continue;
    }
    Method m = ParseMethodLoose(item);
    if (!IsDpMethod(m)) {
      out.push_back(VariantTag::Make(m));
      continue;
    }
    for (double e : epsilons.empty() ? GridFor(m) : epsilons) {
      out.push_back(VariantTag::Make(m, e));
    }
  }
  return out;
}

int CmdIngest(const std::string& dir, const std::string& name,
              const std::string& out, const BackendOptions& bo) {
  DatasetManifest m = Ingest(dir, name.empty() ? std::filesystem::path(dir)
                                                     .filename()
                                                     .string()
                                               : name);
  Gazetteer g;
  if (!bo.gazetteers.empty()) g = Gazetteer::LoadDirectory(bo.gazetteers);
  PiiDetector detector(std::move(g));
  AnnotatePiiCounts(m, [&](std::string_view text) {
    return static_cast<int>(detector.Detect(text).size());
  });
  if (out.empty() || out == "-") {
    std::cout << ManifestToJson(m).dump(2) << "\n";
  } else {
    SaveManifest(m, out);
    std::cerr << "ingested " << m.documents.size() << " documents\n";
  }
  return 0;
}

int CmdDp(const std::string& method_name, double epsilon, std::uint64_t seed,
          const std::string& input, const BackendOptions& bo) {
  Backend backend(bo, {});
  VariantTag tag = VariantTag::Make(ParseMethodLoose(method_name), epsilon);
  if (!IsDpMethod(tag.method)) {
    throw ParameterError("dp needs diffractor, dp-prompt or dp-mlm");
  }
  const Services services = backend.services();
  Anonymizer anonymizer(services);
  std::cout << anonymizer.Apply(ReadInput(input), tag, seed) << "\n";
  return 0;
}

int Guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const TransportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int AnonragMain(int argc, char** argv) {
  CLI::App app{"Anonymization evaluation for retrieval-augmented generation"};
  app.require_subcommand(1);
  BackendOptions bo;

  // ingest
  std::string ingest_dir, ingest_name, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Build a manifest from .txt files");
  ingest->add_option("dir", ingest_dir, "directory of .txt files")->required();
  ingest->add_option("--name", ingest_name, "dataset name");
  ingest->add_option("-o,--out", ingest_out, "manifest path (default stdout)");
  ingest->add_option("--gazetteers", bo.gazetteers, "gazetteer directory");

  // filter
  std::string filter_in, filter_out;
  FilterParams fp;
  auto* filter = app.add_subcommand("filter", "Filter a manifest");
  filter->add_option("manifest", filter_in)->required();
  filter->add_option("-o,--out", filter_out, "output manifest")->required();
  filter->add_option("--min-chars", fp.min_chars);
  filter->add_option("--max-chars", fp.max_chars);
  filter->add_option("--min-pii", fp.min_pii);
  filter->add_option("--max-pii", fp.max_pii);
  filter->add_option("--top-n", fp.top_n);

  // detect
  std::string detect_in;
  auto* detect = app.add_subcommand("detect", "List PII spans as JSON");
  detect->add_option("input", detect_in, "text file (default stdin)");
  detect->add_option("--gazetteers", bo.gazetteers, "gazetteer directory");

  // anonymize
  std::string anon_in, anon_method;
  std::uint64_t anon_seed = 0;
  auto* anonymize =
      app.add_subcommand("anonymize", "Rewrite a text with one method");
  anonymize->add_option("input", anon_in, "text file (default stdin)");
  anonymize->add_option("-m,--method", anon_method, "tag, e.g. pii_label or "
                                                    "diffractor@2")
      ->required();
  anonymize->add_option("--seed", anon_seed);
  AddBackendOptions(anonymize, bo);

  // dp
  std::string dp_method, dp_in;
  double dp_eps = 0;
  std::uint64_t dp_seed = 0;
  auto* dp = app.add_subcommand("dp", "Differentially private rewrite");
  dp->add_option("--method", dp_method, "diffractor, dp-prompt or dp-mlm")
      ->required();
  dp->add_option("--epsilon", dp_eps)->required();
  dp->add_option("--seed", dp_seed);
  dp->add_option("-i,--input", dp_in, "text file (default stdin)");
  AddBackendOptions(dp, bo);

  // index
  std::string index_manifest, index_out;
  std::size_t index_chunk = kDefaultChunkChars;
  auto* index = app.add_subcommand(
      "index", "Embed original documents into an index snapshot");
  index->add_option("manifest", index_manifest)->required();
  index->add_option("-o,--out", index_out)->required();
  index->add_option("--chunk-chars", index_chunk);
  AddBackendOptions(index, bo);

  // run
  std::string run_manifest, run_out, run_placement = "pre", run_id = "run";
  std::vector<std::string> run_methods;
  std::vector<double> run_eps;
  std::vector<std::string> run_tasks;
  RunConfig run_cfg;
  std::optional<std::size_t> run_stop;
  bool run_real_clock = false;
  auto* run = app.add_subcommand("run", "Run a PRE or POST experiment");
  run->add_option("manifest", run_manifest)->required();
  run->add_option("-o,--out", run_out, "run directory")->required();
  run->add_option("--placement", run_placement)
      ->check(CLI::IsMember({"pre", "post"}));
  run->add_option("--methods", run_methods,
                  "tags or method names, or 'all' for the full grid")
      ->delimiter(',')
      ->required();
  run->add_option("--epsilon", run_eps, "budgets for DP methods given by name")
      ->delimiter(',');
  run->add_option("--tasks", run_tasks, "summarize,detect_pii")
      ->delimiter(',');
  run->add_option("--seed", run_cfg.seed);
  run->add_option("--run-id", run_id);
  run->add_option("--concurrency", run_cfg.concurrency);
  run->add_option("--chunk-chars", run_cfg.chunk_chars);
  run->add_option("--top-k", run_cfg.top_k);
  run->add_option("--stop-after", run_stop,
                  "stop after this many records (resume later)");
  run->add_flag("--real-clock", run_real_clock,
                "record wall-clock timings with the mock backend");
  AddBackendOptions(run, bo);

  // evaluate
  std::string eval_dir;
  std::size_t eval_concurrency = 4;
  auto* evaluate = app.add_subcommand("evaluate", "Score a run directory");
  evaluate->add_option("run", eval_dir)->required();
  evaluate->add_option("--concurrency", eval_concurrency);
  AddBackendOptions(evaluate, bo);

  // report
  std::vector<std::string> report_dirs;
  std::string report_format = "text", report_out;
  auto* report = app.add_subcommand(
      "report", "Aggregate scores of one or more run directories");
  report->add_option("runs", report_dirs)->required();
  report->add_option("--format", report_format)
      ->check(CLI::IsMember({"csv", "json", "text"}));
  report->add_option("-o,--out", report_out);

  // serve
  std::string serve_dir = "anonrag-data", serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the REST API");
  serve->add_option("--data-dir", serve_dir);
  serve->add_option("--host", serve_host);
  serve->add_option("--port", serve_port);
  AddBackendOptions(serve, bo);

  // mock-server
  int mock_port = 8090;
  auto* mock_server = app.add_subcommand(
      "mock-server", "Serve mock OpenAI-compatible endpoints");
  mock_server->add_option("--port", mock_port);
  mock_server->add_option("--gazetteers", bo.gazetteers);

  CLI11_PARSE(app, argc, argv);

  return Guarded([&]() -> int {
    if (*ingest) return CmdIngest(ingest_dir, ingest_name, ingest_out, bo);
    if (*filter) {
      SaveManifest(FilterManifest(LoadManifest(filter_in), fp), filter_out);
      return 0;
    }
    if (*detect) {
      Gazetteer g;
      if (!bo.gazetteers.empty()) g = Gazetteer::LoadDirectory(bo.gazetteers);
      const std::string text = ReadInput(detect_in);
      nlohmann::json spans = nlohmann::json::array();
      for (const auto& s : PiiDetector(std::move(g)).Detect(text)) {
        spans.push_back({{"start", s.start},
                         {"end", s.end},
                         {"category", CategoryName(s.category)},
                         {"surface", s.surface}});
      }
      std::cout << spans.dump(2) << "\n";
      return 0;
    }
    if (*anonymize) {
      Backend backend(bo, {});
      const Services services = backend.services();
      const auto tags = ParseMethodList({anon_method}, {});
      if (tags.size() != 1) throw ParameterError("give one method tag");
      std::cout << Anonymizer(services).Apply(ReadInput(anon_in), tags[0],
                                              anon_seed)
                << "\n";
      return 0;
    }
    if (*dp) return CmdDp(dp_method, dp_eps, dp_seed, dp_in, bo);
    if (*index) {
      DatasetManifest m = LoadManifest(index_manifest);
      Backend backend(bo, {});
      VectorIndex vi;
      for (const auto& d : m.documents) {
        std::vector<Chunk> chunks = ChunkDocument(d, index_chunk);
        std::vector<std::string> texts;
        for (const auto& c : chunks) texts.push_back(c.text);
        auto vectors = Embed(texts, *backend.services().embedder);
        std::vector<IndexEntry> entries;
        for (std::size_t i = 0; i < chunks.size(); ++i) {
          entries.push_back({vectors[i], d.id, VariantTag::Original(),
                             chunks[i].index, chunks[i].text});
        }
        vi.Upsert(std::move(entries));
      }
      vi.Save(index_out);
      std::cerr << "indexed " << vi.size() << " chunks\n";
      return 0;
    }
    if (*run) {
      DatasetManifest m = LoadManifest(run_manifest);
      Backend backend(bo, CorpusTexts(m));
      run_cfg.run_id = run_id;
      run_cfg.placement = *ParsePlacement(run_placement);
      run_cfg.methods = ParseMethodList(run_methods, run_eps);
      if (!run_tasks.empty()) {
        run_cfg.tasks.clear();
        for (const auto& t : run_tasks) {
          auto task = ParseTask(t);
          if (!task) throw ParameterError("unknown task " + t);
          run_cfg.tasks.push_back(*task);
        }
      }
      run_cfg.stop_after = run_stop;
      if (backend.mock() && !run_real_clock) {
        run_cfg.clock_ms = [] { return 0LL; };
      }
      RunOutcome out = RunToDirectory(run_cfg, m, backend.services(), run_out);
      std::size_t skipped = 0;
      for (const auto& r : out.records) skipped += r.skipped_reason ? 1 : 0;
      std::cerr << out.records.size() << " records (" << out.resumed
                << " resumed, " << skipped << " skipped)"
                << (out.complete ? "" : ", stopped early") << "\n";
      return out.complete ? 0 : 4;
    }
    if (*evaluate) {
      DatasetManifest m = LoadManifest(RunPaths{eval_dir}.manifest());
      Backend backend(bo, CorpusTexts(m));
      EvaluationOutcome out =
          EvaluateDirectory(eval_dir, backend.services(), eval_concurrency);
      std::cerr << "scored " << out.scores.size() << " records\n";
      return 0;
    }
    if (*report) {
      std::vector<ScoreRecord> scores;
      for (const auto& dir : report_dirs) {
        auto part = LoadScores(RunPaths{dir}.scores());
        scores.insert(scores.end(), part.begin(), part.end());
      }
      Report r = BuildReport(scores);
      if (report_format == "csv") {
        WriteOutput(report_out, ReportCsv(r));
      } else if (report_format == "json") {
        WriteOutput(report_out, ReportJson(r).dump(2) + "\n");
      } else {
        WriteOutput(report_out, ReportText(r));
      }
      return 0;
    }
    if (*serve) {
      Backend backend(bo, {});
      ApiServer server(backend.services(), serve_dir);
      std::cerr << "serving on " << serve_host << ":" << serve_port << "\n";
      return server.Listen(serve_host, serve_port) ? 0 : 1;
    }
    if (*mock_server) {
      Gazetteer g;
      if (!bo.gazetteers.empty()) g = Gazetteer::LoadDirectory(bo.gazetteers);
      MockGenerationClient gen{PiiDetector(std::move(g))};
      HashEmbeddingClient embed;
      MockRewriterClient rewriter;
      UnigramNllScorer scorer({});
      MockEndpointServer server(gen, embed, rewriter, &scorer);
      server.Start(mock_port);
      std::cerr << "mock endpoints at " << server.base_url() << "/v1\n";
      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);
      int sig = 0;
      sigwait(&set, &sig);
      server.Stop();
      return 0;
    }
    return 1;
  });
}

int AnonMain(int argc, char** argv) {
  CLI::App app{"Text anonymization"};
  app.require_subcommand(1);
  BackendOptions bo;
  std::string method, input;
  double epsilon = 0;
  std::uint64_t seed = 0;
  auto* dp = app.add_subcommand("dp", "Differentially private rewrite");
  dp->add_option("--method", method, "diffractor, dp-prompt or dp-mlm")
      ->required();
  dp->add_option("--epsilon", epsilon)->required();
  dp->add_option("--seed", seed);
  dp->add_option("-i,--input", input, "text file (default stdin)");
  AddBackendOptions(dp, bo);
  CLI11_PARSE(app, argc, argv);
  return Guarded([&] { return CmdDp(method, epsilon, seed, input, bo); });
}

}  // namespace anonrag::cli
