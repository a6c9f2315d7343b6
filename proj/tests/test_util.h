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

#ifndef ANONRAG_TESTS_TEST_UTIL_H_
#define ANONRAG_TESTS_TEST_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "anonrag/corpus.h"
#include "anonrag/dp.h"
#include "anonrag/metrics.h"
#include "anonrag/mocks.h"
#include "anonrag/pii.h"
#include "anonrag/pipeline.h"

namespace anonrag::testing {

// Fresh, empty directory under the system temp dir.
std::string TempDir(const std::string& name);

std::string SampleDataDir();  // <source>/data/sample

Gazetteer TestGazetteer();

// n synthetic documents with names, contacts, dates, places and
// organizations, written to dir/<id>.txt and ingested from there.
DatasetManifest SyntheticDataset(const std::string& dir, std::size_t n,
                                 std::uint64_t seed = 1,
                                 const std::string& name = "synthetic");

// Random vectors for every lowercase word of the texts.
EmbeddingLexicon LexiconFor(const std::vector<std::string>& texts,
                            std::size_t dim = 16, std::uint64_t seed = 3);

// Every offline client needed for a full-grid run.
struct MockStack {
  explicit MockStack(const DatasetManifest& dataset);

  PiiDetector detector;
  HashEmbeddingClient embedder;
  HashEmbeddingClient sentence;
  MockGenerationClient generator;
  MockGenerationClient judge;
  MockRewriterClient rewriter;
  UnigramNllScorer scorer;
  EmbeddingLexicon lexicon;
  DiffractorLists lists;

  Services services();
};

RunConfig TestConfig(Placement placement, std::vector<VariantTag> methods,
                     std::uint64_t seed = 42,
                     const std::string& run_id = "test-run");

}  // namespace anonrag::testing

#endif  // ANONRAG_TESTS_TEST_UTIL_H_
