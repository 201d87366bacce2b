// Copyright 2026 The TableQuery Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TABLEQUERY_SERVICE_HPP_
#define TABLEQUERY_SERVICE_HPP_

#include <atomic>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tablequery/pipeline.hpp"

namespace tq {

inline constexpr int kApiVersion = 1;

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui_dir;      // served under /ui when set
  std::string tables_dir;  // uploads are stored here and reloaded at start when set
  bool builtin_tables = false;  // preload the shipped toy tables under their names
  size_t max_upload_bytes = 4 << 20;
  size_t max_result_rows = 1000;
  size_t max_suggestions = 10;
  PredictOptions predict;
};

// Status code plus JSON body; handlers never throw.
struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Request handling over an immutable scorer and a registry of immutable
// table contexts. Uploads swap a new context in under a writer lock; every
// other handler only reads, so concurrent requests see consistent tables.
class Service {
 public:
  Service(const Vocabulary& vocab, std::shared_ptr<const Scorer> scorer, ServiceOptions options = {});

  ApiResponse health() const;
  ApiResponse list_tables() const;
  ApiResponse upload(const std::string& csv, const std::string& name);
  ApiResponse describe(const std::string& id) const;
  ApiResponse ask(const std::string& id, const std::string& request_body) const;
  ApiResponse suggest(const std::string& id, const std::string& prefix) const;

  // Registers a table under a fresh id and returns the id.
  std::string add_table(std::shared_ptr<const Table> table);
  // Registers a prepared context under its own id, replacing any table
  // with that id.
  void install(std::shared_ptr<const TableContext> ctx);

  const ServiceOptions& options() const { return options_; }

 private:
  std::shared_ptr<const TableContext> find(const std::string& id) const;
  nlohmann::json table_json(const TableContext& ctx) const;

  const Vocabulary& vocab_;
  std::shared_ptr<const Scorer> scorer_;
  ServiceOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const TableContext>> tables_;
  std::atomic<int> next_id_{1};
};

// Blocks serving HTTP until the process is stopped. Returns non-zero when
// the socket cannot be bound.
int run_service(const Vocabulary& vocab, std::shared_ptr<const Scorer> scorer, const ServiceOptions& options);

// Binds a Service to an HTTP server object (httplib::Server); kept opaque so
// callers need not include the HTTP header.
class HttpServer {
 public:
  HttpServer(Service& service);
  ~HttpServer();
  // Binds to any free port on host and returns it, or -1.
  int bind_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  void listen();  // blocks
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tq

#endif  // TABLEQUERY_SERVICE_HPP_
