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

#ifndef ANONRAG_CORPUS_H_
#define ANONRAG_CORPUS_H_

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace anonrag {

inline constexpr std::size_t kDefaultChunkChars = 4000;

struct Document {
  std::string id;
  std::string source;
  std::string text;
  std::size_t char_count = 0;  // UTF-8 code points of text
  std::optional<int> pii_count;

  static Document Make(std::string id, std::string source, std::string text);
};

struct Chunk {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;
};

struct FilterParams {
  std::size_t min_chars = 0;
  std::size_t max_chars = std::numeric_limits<std::size_t>::max();
  int min_pii = 0;
  int max_pii = std::numeric_limits<int>::max();
  std::size_t top_n = std::numeric_limits<std::size_t>::max();
};

struct DatasetManifest {
  std::string name;
  // Directory the raw texts were read from; empty for in-memory manifests.
  std::string text_dir;
  std::optional<FilterParams> filters_applied;
  std::vector<Document> documents;  // sorted by id, ids distinct

  const Document* Find(std::string_view id) const;
};

// One Document per .txt file in dir_path, id = file stem, sorted by id.
DatasetManifest Ingest(const std::string& dir_path, const std::string& name);

// Fills pii_count on every document using the given counter.
void AnnotatePiiCounts(DatasetManifest& manifest,
                       const std::function<int(std::string_view)>& count);

// Keeps documents inside both ranges, then the top_n by pii_count with ties
// broken by ascending id. Output stays sorted by id.
DatasetManifest FilterManifest(const DatasetManifest& manifest,
                               const FilterParams& params);

// Greedy split at the last whitespace at or before max_chars code points;
// hard split when a window has no usable whitespace. Concatenating the
// chunks reproduces d.text exactly.
std::vector<Chunk> ChunkDocument(const Document& d,
                                 std::size_t max_chars = kDefaultChunkChars);

nlohmann::json ManifestToJson(const DatasetManifest& manifest);
// Texts are re-read from text_dir when present.
DatasetManifest ManifestFromJson(const nlohmann::json& j);

void SaveManifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest LoadManifest(const std::string& path);

}  // namespace anonrag

#endif  // ANONRAG_CORPUS_H_
