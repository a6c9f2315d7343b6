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

#include "anonrag/corpus.h"

#include <algorithm>
#include <filesystem>
#include <set>

#include "anonrag/errors.h"
#include "anonrag/text_util.h"

namespace anonrag {

namespace fs = std::filesystem;

Document Document::Make(std::string id, std::string source, std::string text) {
  Document d;
  d.id = std::move(id);
  d.source = std::move(source);
  d.char_count = Utf8Length(text);
  d.text = std::move(text);
  return d;
}

const Document* DatasetManifest::Find(std::string_view id) const {
  auto it = std::lower_bound(
      documents.begin(), documents.end(), id,
      [](const Document& d, std::string_view key) { return d.id < key; });
  if (it == documents.end() || it->id != id) return nullptr;
  return &*it;
}

DatasetManifest Ingest(const std::string& dir_path, const std::string& name) {
  std::error_code ec;
  if (!fs::is_directory(dir_path, ec)) {
    throw IngestError("not a directory: " + dir_path);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir_path, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IngestError("cannot list directory: " + dir_path);
  if (files.empty()) {
    throw IngestError("empty manifest: no documents in " + dir_path);
  }

  DatasetManifest m;
  m.name = name;
  m.text_dir = fs::absolute(dir_path).string();
  std::set<std::string> seen;
  for (const auto& path : files) {
    std::string id = path.stem().string();
    if (!seen.insert(id).second) {
      throw IngestError("duplicate document id '" + id + "' from " +
                        path.string());
    }
    std::string text;
    try {
      text = ReadFile(path.string());
    } catch (const IngestError&) {
      throw IngestError("cannot read document file: " + path.string());
    }
    if (text.empty()) {
      throw IngestError("empty document file: " + path.string());
    }
    m.documents.push_back(Document::Make(std::move(id), name, std::move(text)));
  }
  std::sort(m.documents.begin(), m.documents.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  return m;
}

void AnnotatePiiCounts(DatasetManifest& manifest,
                       const std::function<int(std::string_view)>& count) {
  for (auto& d : manifest.documents) d.pii_count = count(d.text);
}

DatasetManifest FilterManifest(const DatasetManifest& manifest,
                               const FilterParams& params) {
  if (params.min_chars > params.max_chars) {
    throw ParameterError("min_chars exceeds max_chars");
  }
  if (params.min_pii > params.max_pii) {
    throw ParameterError("min_pii exceeds max_pii");
  }
  std::vector<const Document*> kept;
  for (const auto& d : manifest.documents) {
    if (!d.pii_count) {
      throw ParameterError("pii_count not populated for document " + d.id);
    }
    if (d.char_count < params.min_chars || d.char_count > params.max_chars) {
      continue;
    }
    if (*d.pii_count < params.min_pii || *d.pii_count > params.max_pii) {
      continue;
    }
    kept.push_back(&d);
  }
  std::sort(kept.begin(), kept.end(), [](const Document* a, const Document* b) {
    if (*a->pii_count != *b->pii_count) return *a->pii_count > *b->pii_count;
    return a->id < b->id;
  });
  if (kept.size() > params.top_n) kept.resize(params.top_n);
  std::sort(kept.begin(), kept.end(),
            [](const Document* a, const Document* b) { return a->id < b->id; });

  DatasetManifest out;
  out.name = manifest.name;
  out.text_dir = manifest.text_dir;
  out.filters_applied = params;
  out.documents.reserve(kept.size());
  for (const Document* d : kept) out.documents.push_back(*d);
  return out;
}

std::vector<Chunk> ChunkDocument(const Document& d, std::size_t max_chars) {
  if (max_chars == 0) throw ParameterError("max_chars must be at least 1");
  std::vector<Chunk> chunks;
  std::string_view rest = d.text;
  while (!rest.empty()) {
    // Walk up to max_chars code points; remember where whitespace starts.
    std::size_t pos = 0;
    std::size_t points = 0;
    std::size_t last_space = 0;  // byte offset, 0 = none usable
    while (pos < rest.size() && points < max_chars) {
      pos += Utf8SequenceLength(rest, pos);
      ++points;
      if (pos < rest.size() && IsAsciiSpace(rest[pos])) last_space = pos;
    }
    std::size_t cut = rest.size();
    if (pos < rest.size()) cut = last_space > 0 ? last_space : pos;
    chunks.push_back(Chunk{d.id, chunks.size(), std::string(rest.substr(0, cut))});
    rest.remove_prefix(cut);
  }
  return chunks;
}

namespace {

nlohmann::json FilterToJson(const FilterParams& p) {
  auto bound = [](auto v, auto unbounded) -> nlohmann::json {
    if (v == unbounded) return nullptr;
    return v;
  };
  return {
      {"min_chars", p.min_chars},
      {"max_chars",
       bound(p.max_chars, std::numeric_limits<std::size_t>::max())},
      {"min_pii", p.min_pii},
      {"max_pii", bound(p.max_pii, std::numeric_limits<int>::max())},
      {"top_n", bound(p.top_n, std::numeric_limits<std::size_t>::max())},
  };
}

FilterParams FilterFromJson(const nlohmann::json& j) {
  FilterParams p;
  p.min_chars = j.value("min_chars", std::size_t{0});
  if (j.contains("max_chars") && !j["max_chars"].is_null()) {
    p.max_chars = j["max_chars"].get<std::size_t>();
  }
  p.min_pii = j.value("min_pii", 0);
  if (j.contains("max_pii") && !j["max_pii"].is_null()) {
    p.max_pii = j["max_pii"].get<int>();
  }
  if (j.contains("top_n") && !j["top_n"].is_null()) {
    p.top_n = j["top_n"].get<std::size_t>();
  }
  return p;
}

}  // namespace

nlohmann::json ManifestToJson(const DatasetManifest& manifest) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : manifest.documents) {
    docs.push_back({{"id", d.id},
                    {"source", d.source},
                    {"char_count", d.char_count},
                    {"pii_count", d.pii_count ? nlohmann::json(*d.pii_count)
                                              : nlohmann::json(nullptr)}});
  }
  return {{"name", manifest.name},
          {"text_dir", manifest.text_dir},
          {"filters_applied", manifest.filters_applied
                                  ? FilterToJson(*manifest.filters_applied)
                                  : nlohmann::json(nullptr)},
          {"documents", docs}};
}

DatasetManifest ManifestFromJson(const nlohmann::json& j) {
  DatasetManifest m;
  m.name = j.at("name").get<std::string>();
  m.text_dir = j.value("text_dir", std::string());
  if (j.contains("filters_applied") && !j["filters_applied"].is_null()) {
    m.filters_applied = FilterFromJson(j["filters_applied"]);
  }
  for (const auto& jd : j.at("documents")) {
    Document d;
    d.id = jd.at("id").get<std::string>();
    d.source = jd.value("source", m.name);
    if (!m.text_dir.empty()) {
      d.text = ReadFile((fs::path(m.text_dir) / (d.id + ".txt")).string());
      d.char_count = Utf8Length(d.text);
    } else {
      d.text = jd.value("text", std::string());
      d.char_count = jd.value("char_count", Utf8Length(d.text));
    }
    if (jd.contains("pii_count") && !jd["pii_count"].is_null()) {
      d.pii_count = jd["pii_count"].get<int>();
    }
    m.documents.push_back(std::move(d));
  }
  std::sort(m.documents.begin(), m.documents.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  return m;
}

void SaveManifest(const DatasetManifest& manifest, const std::string& path) {
  WriteFile(path, ManifestToJson(manifest).dump(2) + "\n");
}

DatasetManifest LoadManifest(const std::string& path) {
  try {
    return ManifestFromJson(nlohmann::json::parse(ReadFile(path)));
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("malformed manifest " + path + ": " + e.what());
  }
}

}  // namespace anonrag
