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

#include "test_util.h"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>

#include "anonrag/text_util.h"

namespace anonrag::testing {

namespace {

const char* const kFirst[] = {"Alice", "Brian", "Chloe", "Daniel", "Elena",
                              "Farid", "Grace", "Hiro"};
const char* const kLast[] = {"Morrison", "Okafor", "Lindqvist", "Tanaka",
                             "Rossi", "Haddad", "Novak", "Kowalski"};
const char* const kCities[] = {"Lorain", "Zurich", "Houston", "Ankara",
                               "Lisbon", "Osaka"};
const char* const kOrgs[] = {"Howard University", "Northwind Bank",
                             "Vantage Capital", "Riverside Hospital"};
const char* const kMonths[] = {"January", "March", "May", "July",
                               "September", "November"};
const char* const kFiller[] = {
    "The board reviewed the quarterly figures and approved the plan.",
    "Analysts expect the market to remain volatile for several weeks.",
    "The committee asked for further evidence before reaching a decision.",
    "Local residents raised concerns about traffic and noise.",
    "A spokesperson declined to comment on the ongoing negotiations.",
    "The report highlights rising costs and a shortage of skilled staff.",
};

}  // namespace

std::string TempDir(const std::string& name) {
  namespace fs = std::filesystem;
  static std::uint64_t counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("anonrag-test-" + std::to_string(::getpid()) + "-" + name +
                "-" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string SampleDataDir() {
  return std::string(ANONRAG_SOURCE_DIR) + "/data/sample";
}

Gazetteer TestGazetteer() {
  Gazetteer g;
  for (const char* f : kFirst) {
    for (const char* l : kLast) {
      g.Add(EntityCategory::kPerson, std::string(f) + " " + l);
    }
    g.Add(EntityCategory::kPerson, f);
  }
  for (const char* c : kCities) g.Add(EntityCategory::kLocation, c);
  for (const char* o : kOrgs) g.Add(EntityCategory::kOrganization, o);
  return g;
}

DatasetManifest SyntheticDataset(const std::string& dir, std::size_t n,
                                 std::uint64_t seed, const std::string& name) {
  std::mt19937_64 rng(seed);
  auto pick = [&](const auto& arr) {
    return arr[rng() % std::size(arr)];
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::string first = pick(kFirst), last = pick(kLast);
    std::string text = first + " " + last + " joined " + pick(kOrgs) +
                       " in " + pick(kCities) + " on " +
                       std::to_string(1 + rng() % 28) + " " + pick(kMonths) +
                       " " + std::to_string(1990 + rng() % 30) + ". ";
    for (int s = 0; s < 3; ++s) text += std::string(pick(kFiller)) + " ";
    text += "Contact " + ToLowerAscii(first) + "." + ToLowerAscii(last) +
            "@example.com or call 555-" + std::to_string(100 + rng() % 900) +
            "-" + std::to_string(1000 + rng() % 9000) + ". ";
    for (int s = 0; s < 2; ++s) text += std::string(pick(kFiller)) + " ";
    text += "Later, " + std::string(pick(kFirst)) + " met " + first +
            " in " + pick(kCities) + ".\n";
    char id[32];
    std::snprintf(id, sizeof id, "doc-%03zu", i);
    WriteFile(dir + "/" + id + ".txt", text);
  }
  return Ingest(dir, name);
}

EmbeddingLexicon LexiconFor(const std::vector<std::string>& texts,
                            std::size_t dim, std::uint64_t seed) {
  std::vector<std::string> words;
  for (const auto& t : texts) {
    for (const auto& tok : TokenizeForObfuscation(t)) {
      if (!tok.empty() && IsAsciiAlpha(tok[0])) words.push_back(tok);
    }
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> vectors;
  for (std::size_t i = 0; i < words.size(); ++i) {
    Vector v(dim);
    for (double& x : v) x = normal(rng);
    vectors.push_back(std::move(v));
  }
  return EmbeddingLexicon(std::move(words), std::move(vectors));
}

namespace {

std::vector<std::string> Texts(const DatasetManifest& d) {
  std::vector<std::string> out;
  for (const auto& doc : d.documents) out.push_back(doc.text);
  return out;
}

}  // namespace

MockStack::MockStack(const DatasetManifest& dataset)
    : detector(TestGazetteer()),
      embedder(64, 0),
      sentence(64, 1),
      generator(detector),
      judge(detector),
      rewriter(7),
      scorer(Texts(dataset)),
      lexicon(LexiconFor(Texts(dataset))),
      lists(BuildLists(lexicon, kDefaultNumLists, 11)) {}

Services MockStack::services() {
  Services s;
  s.embedder = &embedder;
  s.generator = &generator;
  s.judge = &judge;
  s.sentence_embedder = &sentence;
  s.scorer = &scorer;
  s.dp_mlm = &rewriter;
  s.detector = &detector;
  s.lexicon = &lexicon;
  s.lists = &lists;
  return s;
}

RunConfig TestConfig(Placement placement, std::vector<VariantTag> methods,
                     std::uint64_t seed, const std::string& run_id) {
  RunConfig cfg;
  cfg.run_id = run_id;
  cfg.placement = placement;
  cfg.methods = std::move(methods);
  cfg.seed = seed;
  cfg.concurrency = 4;
  cfg.clock_ms = [] { return 0LL; };
  return cfg;
}

}  // namespace anonrag::testing
