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

#ifndef ANONRAG_SERVER_H_
#define ANONRAG_SERVER_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "anonrag/corpus.h"
#include "anonrag/pipeline.h"

namespace httplib {
class Server;
}

namespace anonrag {

enum class RunStatus { kPending, kRunning, kDone, kFailed };

std::string_view RunStatusName(RunStatus status);

// JSON REST API over a directory of uploaded documents and run outputs.
//
//   POST /documents          {"id"?, "text", "source"?}
//   GET  /methods
//   POST /runs               run config plus optional "doc_ids"
//   GET  /runs/{id}          status and answer records
//   GET  /runs/{id}/scores
//   GET  /reports/{id}       ?format=json|csv|text
//
// Runs execute on background threads and are polled for status.
class ApiServer {
 public:
  ApiServer(Services services, std::string data_dir);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  int Start(const std::string& host = "127.0.0.1", int port = 0);
  // Binds and serves on the calling thread until Stop().
  bool Listen(const std::string& host, int port);
  void Stop();
  // Blocks until every background run has finished.
  void WaitForRuns();

  int port() const { return port_; }
  std::string base_url() const;

 private:
  struct RunState {
    RunConfig config;
    RunStatus status = RunStatus::kPending;
    std::string error;
    std::string dir;
  };

  void Route();
  void Execute(const std::string& run_id, DatasetManifest dataset);
  std::optional<RunState> Snapshot(const std::string& run_id) const;

  Services services_;
  std::string data_dir_;
  std::unique_ptr<httplib::Server> server_;
  std::thread listener_;
  int port_ = 0;

  mutable std::mutex mu_;
  DatasetManifest uploads_;
  std::map<std::string, RunState> runs_;
  std::vector<std::thread> workers_;
  std::size_t next_run_ = 1;
};

}  // namespace anonrag

#endif  // ANONRAG_SERVER_H_
