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

#include "anonrag/server.h"

#include <algorithm>
#include <filesystem>
#include <regex>
#include <set>
#include <utility>

#include "anonrag/dp.h"
#include "anonrag/errors.h"
#include "anonrag/records.h"
#include "anonrag/report.h"
#include "anonrag/text_util.h"
#include "httplib.h"
#include "json.hpp"

namespace anonrag {

namespace {

using nlohmann::json;

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void Fail(httplib::Response& res, int status, const std::string& message) {
  Reply(res, status, {{"error", message}});
}

bool ValidId(const std::string& id) {
  static const std::regex kId("[A-Za-z0-9][A-Za-z0-9_.-]{0,127}");
  return std::regex_match(id, kId);
}

json MethodsJson() {
  auto eps_list = [](const auto& grid) {
    json out = json::array();
    for (double e : grid) out.push_back(e);
    return out;
  };
  json methods = json::array();
  for (Method m : {Method::kPiiDelete, Method::kPiiLabel,
                   Method::kPiiSynthetic}) {
    methods.push_back({{"method", MethodName(m)}, {"epsilons", nullptr}});
  }
  methods.push_back({{"method", MethodName(Method::kDiffractor)},
                     {"epsilons", eps_list(kDiffractorEpsilons)}});
  methods.push_back({{"method", MethodName(Method::kDpPrompt)},
                     {"epsilons", eps_list(kDpPromptEpsilons)}});
  methods.push_back({{"method", MethodName(Method::kDpMlm)},
                     {"epsilons", eps_list(kDpMlmEpsilons)}});
  json tags = json::array();
  for (const auto& t : FullGrid()) tags.push_back(t.ToString());
  return {{"methods", methods}, {"tags", tags}};
}

}  // namespace

std::string_view RunStatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kPending:
      return "pending";
    case RunStatus::kRunning:
      return "running";
    case RunStatus::kDone:
      return "done";
    case RunStatus::kFailed:
      return "failed";
  }
  return "";
}

ApiServer::ApiServer(Services services, std::string data_dir)
    : services_(services),
      data_dir_(std::move(data_dir)),
      server_(std::make_unique<httplib::Server>()) {
  namespace fs = std::filesystem;
  services_.Validate();
  uploads_.name = "uploads";
  uploads_.text_dir = data_dir_ + "/documents";
  fs::create_directories(uploads_.text_dir);
  fs::create_directories(data_dir_ + "/runs");
  for (const auto& entry : fs::directory_iterator(uploads_.text_dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::string text = ReadFile(entry.path().string());
    if (text.empty()) continue;
    uploads_.documents.push_back(
        Document::Make(entry.path().stem().string(), entry.path().string(),
                       std::move(text)));
  }
  std::sort(uploads_.documents.begin(), uploads_.documents.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  Route();
}

ApiServer::~ApiServer() {
  Stop();
  WaitForRuns();
}

std::string ApiServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

int ApiServer::Start(const std::string& host, int port) {
  port_ = port == 0 ? server_->bind_to_any_port(host)
                    : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw TransportError("cannot bind " + host, 1);
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

bool ApiServer::Listen(const std::string& host, int port) {
  port_ = port;
  return server_->listen(host, port);
}

void ApiServer::Stop() {
  if (server_) server_->stop();
  if (listener_.joinable()) listener_.join();
}

void ApiServer::WaitForRuns() {
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

std::optional<ApiServer::RunState> ApiServer::Snapshot(
    const std::string& run_id) const {
  std::lock_guard lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return std::nullopt;
  return it->second;
}

void ApiServer::Execute(const std::string& run_id, DatasetManifest dataset) {
  RunConfig cfg;
  std::string dir;
  {
    std::lock_guard lock(mu_);
    RunState& state = runs_.at(run_id);
    state.status = RunStatus::kRunning;
    cfg = state.config;
    dir = state.dir;
  }
  RunStatus status = RunStatus::kDone;
  std::string error;
  try {
    RunToDirectory(cfg, dataset, services_, dir);
    EvaluateDirectory(dir, services_, cfg.concurrency);
  } catch (const std::exception& e) {
    status = RunStatus::kFailed;
    error = e.what();
  }
  std::lock_guard lock(mu_);
  RunState& state = runs_.at(run_id);
  state.status = status;
  state.error = error;
}

void ApiServer::Route() {
  server_->set_exception_handler(
      [](const httplib::Request&, httplib::Response& res,
         std::exception_ptr ep) {
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          Fail(res, 500, e.what());
        } catch (...) {
          Fail(res, 500, "internal error");
        }
      });

  server_->Post("/documents", [this](const httplib::Request& req,
                                     httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("text") ||
        !body["text"].is_string()) {
      return Fail(res, 400, "body must be a JSON object with a text field");
    }
    std::string text = body["text"].get<std::string>();
    if (Trim(text).empty()) return Fail(res, 400, "document text is empty");
    std::lock_guard lock(mu_);
    std::string id = body.value("id", "");
    if (id.empty()) {
      id = "doc-" + std::to_string(Fnv1a64(text) % 1000000007ULL);
    }
    if (!ValidId(id)) return Fail(res, 400, "invalid document id");
    if (const Document* existing = uploads_.Find(id)) {
      if (existing->text != text) {
        return Fail(res, 409, "document " + id + " exists with other text");
      }
    } else {
      const std::string path = uploads_.text_dir + "/" + id + ".txt";
      WriteFile(path, text);
      Document d = Document::Make(id, body.value("source", path), text);
      auto pos = std::lower_bound(
          uploads_.documents.begin(), uploads_.documents.end(), id,
          [](const Document& a, const std::string& b) { return a.id < b; });
      uploads_.documents.insert(pos, std::move(d));
    }
    const Document* d = uploads_.Find(id);
    int pii = static_cast<int>(services_.detector->Detect(d->text).size());
    Reply(res, 201,
          {{"id", d->id}, {"char_count", d->char_count}, {"pii_count", pii}});
  });

  server_->Get("/methods", [](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, MethodsJson());
  });

  server_->Post("/runs", [this](const httplib::Request& req,
                                httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      return Fail(res, 400, "body must be a JSON object");
    }
    RunConfig cfg;
    try {
      cfg = RunConfig::FromJson(body);
      if (!body.contains("run_id")) cfg.run_id.clear();
    } catch (const Error& e) {
      return Fail(res, 400, e.what());
    }
    std::lock_guard lock(mu_);
    if (cfg.run_id.empty()) {
      do {
        cfg.run_id = "run-" + std::to_string(next_run_++);
      } while (runs_.count(cfg.run_id) > 0);
    }
    try {
      cfg.Validate();
    } catch (const Error& e) {
      return Fail(res, 400, e.what());
    }
    if (!ValidId(cfg.run_id)) return Fail(res, 400, "invalid run id");
    if (runs_.count(cfg.run_id) > 0 ||
        std::filesystem::exists(data_dir_ + "/runs/" + cfg.run_id)) {
      return Fail(res, 409, "run " + cfg.run_id + " already exists");
    }
    DatasetManifest dataset;
    dataset.name = body.value("dataset", uploads_.name);
    dataset.text_dir = uploads_.text_dir;
    if (body.contains("doc_ids")) {
      if (!body["doc_ids"].is_array()) {
        return Fail(res, 400, "doc_ids must be a list");
      }
      std::set<std::string> ids;
      for (const auto& id : body["doc_ids"]) {
        if (!id.is_string()) return Fail(res, 400, "doc ids must be strings");
        ids.insert(id.get<std::string>());
      }
      for (const auto& id : ids) {
        const Document* d = uploads_.Find(id);
        if (d == nullptr) return Fail(res, 400, "unknown document " + id);
        dataset.documents.push_back(*d);
      }
    } else {
      dataset.documents = uploads_.documents;
    }
    if (dataset.documents.empty()) {
      return Fail(res, 400, "no documents to run on");
    }
    RunState state;
    state.config = cfg;
    state.dir = data_dir_ + "/runs/" + cfg.run_id;
    runs_.emplace(cfg.run_id, std::move(state));
    workers_.emplace_back(
        [this, id = cfg.run_id, dataset = std::move(dataset)]() mutable {
          Execute(id, std::move(dataset));
        });
    Reply(res, 202, {{"run_id", cfg.run_id}, {"status", "pending"}});
  });

  server_->Get(R"(/runs/([^/]+))", [this](const httplib::Request& req,
                                          httplib::Response& res) {
    auto state = Snapshot(req.matches[1]);
    if (!state) return Fail(res, 404, "unknown run");
    json records = json::array();
    const RunPaths paths{state->dir};
    if (std::filesystem::exists(paths.answers()) &&
        state->status != RunStatus::kRunning) {
      for (const auto& r : LoadAnswers(paths.answers())) {
        records.push_back(ToJson(r));
      }
    }
    Reply(res, 200,
          {{"run_id", state->config.run_id},
           {"status", RunStatusName(state->status)},
           {"error", state->error},
           {"config", state->config.ToJson()},
           {"records", records}});
  });

  server_->Get(R"(/runs/([^/]+)/scores)", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
    auto state = Snapshot(req.matches[1]);
    if (!state) return Fail(res, 404, "unknown run");
    json scores = json::array();
    const RunPaths paths{state->dir};
    if (state->status == RunStatus::kDone) {
      for (const auto& s : LoadScores(paths.scores())) {
        scores.push_back(ToJson(s));
      }
    }
    Reply(res, 200, {{"run_id", state->config.run_id},
                     {"status", RunStatusName(state->status)},
                     {"scores", scores}});
  });

  server_->Get(R"(/reports/([^/]+))", [this](const httplib::Request& req,
                                             httplib::Response& res) {
    auto state = Snapshot(req.matches[1]);
    if (!state) return Fail(res, 404, "unknown run");
    if (state->status != RunStatus::kDone) {
      return Fail(res, 409, "run is " +
                                std::string(RunStatusName(state->status)));
    }
    Report report;
    try {
      report = BuildReport(LoadScores(RunPaths{state->dir}.scores()));
    } catch (const ParameterError& e) {
      return Fail(res, 422, e.what());
    }
    const std::string format =
        req.has_param("format") ? req.get_param_value("format") : "json";
    if (format == "csv") {
      res.set_content(ReportCsv(report), "text/csv");
    } else if (format == "text") {
      res.set_content(ReportText(report), "text/plain");
    } else if (format == "json") {
      Reply(res, 200, ReportJson(report));
    } else {
      Fail(res, 400, "format must be json, csv or text");
    }
  });
}

}  // namespace anonrag
