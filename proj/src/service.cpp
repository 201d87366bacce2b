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

#include "tablequery/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "tablequery/harness.hpp"

namespace tq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ApiResponse error(int status, const std::string& message) {
  return {status, {{"version", kApiVersion}, {"error", message}}};
}

json value_json(const Value& v) {
  if (const double* x = std::get_if<double>(&v)) return *x;
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  if (const Date* d = std::get_if<Date>(&v)) return d->iso();
  return nullptr;
}

std::string_view type_name(ColumnType t) {
  switch (t) {
    case ColumnType::kStr: return "str";
    case ColumnType::kNum: return "num";
    case ColumnType::kDate: return "date";
  }
  return "?";
}

std::string span_text(const std::string& question, const AbstractedUtterance& u, Span s) {
  if (s.start < 0 || s.end <= s.start || static_cast<size_t>(s.end) > u.tokens.size()) return {};
  const size_t b = u.tokens[s.start].source.begin;
  const size_t e = u.tokens[s.end - 1].source.end;
  return e > b && e <= question.size() ? question.substr(b, e - b) : std::string();
}

json node_json(const DerivationNode& n, const std::string& question, const AbstractedUtterance& u,
               NodeScorer& scorer) {
  json j = {
      {"rule", std::string(rule_name(n.rule))},
      {"predicate", n.predicate == Predicate::kNone ? json(nullptr) : json(std::string(predicate_name(n.predicate)))},
      {"symbol", n.result.signature()},
      {"span", {n.span.start, n.span.end}},
      {"text", span_text(question, u, n.span)},
      {"score", n.is_leaf() ? 0.0 : scorer.score(n.rule, n.predicate, n.span)},
  };
  json children = json::array();
  for (const auto& c : n.children) children.push_back(node_json(*c, question, u, scorer));
  j["children"] = std::move(children);
  return j;
}

std::string id_suffix(int n) { return "t" + std::to_string(n); }

}  // namespace

Service::Service(const Vocabulary& vocab, std::shared_ptr<const Scorer> scorer, ServiceOptions options)
    : vocab_(vocab), scorer_(std::move(scorer)), options_(std::move(options)) {
  if (!options_.tables_dir.empty() && fs::is_directory(options_.tables_dir)) {
    for (auto& [id, ctx] : load_tables_dir(options_.tables_dir, vocab_)) tables_.emplace(id, ctx);
  }
  if (options_.builtin_tables) {
    for (auto& [id, ctx] : builtin_tables(vocab_)) tables_.emplace(id, ctx);
  }
}

void Service::install(std::shared_ptr<const TableContext> ctx) {
  std::unique_lock lock(mutex_);
  tables_[ctx->id] = std::move(ctx);
}

std::shared_ptr<const TableContext> Service::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = tables_.find(id);
  return it == tables_.end() ? nullptr : it->second;
}

json Service::table_json(const TableContext& ctx) const {
  json cols = json::array();
  for (const Column& c : ctx.table->columns()) cols.push_back({{"name", c.name}, {"type", type_name(c.type)}});
  return {{"id", ctx.id}, {"name", ctx.table->name()}, {"columns", cols}, {"rows", ctx.table->rows().size()}};
}

ApiResponse Service::health() const {
  std::shared_lock lock(mutex_);
  return {200, {{"version", kApiVersion}, {"status", "ok"}, {"tables", tables_.size()}}};
}

ApiResponse Service::list_tables() const {
  std::shared_lock lock(mutex_);
  json list = json::array();
  for (const auto& [id, ctx] : tables_) list.push_back(table_json(*ctx));
  return {200, {{"version", kApiVersion}, {"tables", list}}};
}

std::string Service::add_table(std::shared_ptr<const Table> table) {
  std::string id;
  {
    std::shared_lock lock(mutex_);
    do {
      id = id_suffix(next_id_++);
    } while (tables_.count(id) > 0);
  }
  // The index is built outside the lock; readers keep seeing the old registry.
  auto ctx = make_context(id, std::move(table), vocab_);
  std::unique_lock lock(mutex_);
  tables_.emplace(id, std::move(ctx));
  return id;
}

ApiResponse Service::upload(const std::string& csv, const std::string& name) {
  if (csv.size() > options_.max_upload_bytes) {
    return error(413, "upload of " + std::to_string(csv.size()) + " bytes exceeds the limit of " +
                          std::to_string(options_.max_upload_bytes) + " bytes");
  }
  std::shared_ptr<const Table> table;
  try {
    std::istringstream in(csv);
    table = std::make_shared<Table>(read_table_csv(in, name.empty() ? "table" : name));
    if (table->num_columns() == 0) return error(400, "the CSV has no columns");
  } catch (const std::exception& e) {
    return error(400, std::string("invalid table: ") + e.what());
  }
  const std::string id = add_table(table);
  if (!options_.tables_dir.empty()) {
    std::error_code ec;
    fs::create_directories(options_.tables_dir, ec);
    std::ofstream out(fs::path(options_.tables_dir) / (id + ".csv"));
    table->write_csv(out);
  }
  ApiResponse r{201, {{"version", kApiVersion}}};
  r.body["table"] = table_json(*find(id));
  return r;
}

ApiResponse Service::describe(const std::string& id) const {
  auto ctx = find(id);
  if (!ctx) return error(404, "unknown table " + id);
  return {200, {{"version", kApiVersion}, {"table", table_json(*ctx)}}};
}

ApiResponse Service::ask(const std::string& id, const std::string& request_body) const {
  auto ctx = find(id);
  if (!ctx) return error(404, "unknown table " + id);
  std::string question;
  try {
    const json req = json::parse(request_body);
    question = req.at("question").get<std::string>();
  } catch (const std::exception&) {
    return error(400, "expected a JSON object with a string field \"question\"");
  }
  try {
    const Prediction p = predict(question, *ctx, vocab_, *scorer_, options_.predict);
    json utts = json::array();
    for (size_t i = 0; i < p.utterances.size(); ++i) {
      const auto& s = p.utterance_scores[i];
      utts.push_back({{"text", p.utterances[i].render()},
                      {"annotation_score", p.utterances[i].annotation_score},
                      {"unknown_count", p.utterances[i].unknown_count},
                      {"score", s ? json(*s) : json(nullptr)}});
    }
    json body = {{"version", kApiVersion},
                 {"table", id},
                 {"question", question},
                 {"utterances", utts},
                 {"chosen", p.chosen >= 0 ? json(p.chosen) : json(nullptr)},
                 {"derivation", nullptr},
                 {"score", p.derivation ? json(p.score) : json(nullptr)},
                 {"sql", nullptr},
                 {"result", nullptr},
                 {"error", p.ok() ? json(nullptr) : json({{"kind", std::string(failure_name(p.failure))},
                                                           {"message", p.error}})}};
    if (p.derivation) {
      const AbstractedUtterance& u = p.utterances[p.chosen];
      auto node_scorer = scorer_->bind(u);
      body["derivation"] = node_json(*p.derivation->root, question, u, *node_scorer);
    }
    if (p.ok()) {
      body["sql"] = render_sql(*p.sql, ctx->table->name());
      const ResultTable r = execute(*p.sql, *ctx->table);
      json rows = json::array();
      for (size_t i = 0; i < r.rows.size() && i < options_.max_result_rows; ++i) {
        json row = json::array();
        for (const Value& v : r.rows[i]) row.push_back(value_json(v));
        rows.push_back(std::move(row));
      }
      body["result"] = {{"columns", r.headers},
                        {"rows", rows},
                        {"row_count", r.rows.size()},
                        {"truncated", r.rows.size() > options_.max_result_rows}};
    }
    return {200, body};
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

ApiResponse Service::suggest(const std::string& id, const std::string& prefix) const {
  auto ctx = find(id);
  if (!ctx) return error(404, "unknown table " + id);
  // Only the word being typed is completed.
  const size_t cut = prefix.find_last_of(" \t\n");
  const std::string head = cut == std::string::npos ? std::string() : prefix.substr(0, cut + 1);
  const std::string fragment = to_lower(cut == std::string::npos ? prefix : prefix.substr(cut + 1));

  struct Candidate {
    std::string text;
    int priority;  // 0 column, 1 value, 2 common word
    int frequency;
  };
  std::map<std::string, Candidate> found;
  auto offer = [&](const std::string& text, int priority, int frequency) {
    const std::string lower = to_lower(text);
    if (fragment.empty() || !lower.starts_with(fragment)) return;
    auto [it, inserted] = found.emplace(lower, Candidate{lower, priority, frequency});
    if (!inserted && std::pair(priority, -frequency) < std::pair(it->second.priority, -it->second.frequency)) {
      it->second = {lower, priority, frequency};
    }
  };
  const Table& t = *ctx->table;
  for (int c = 0; c < t.num_columns(); ++c) {
    int filled = 0;
    for (const auto& row : t.rows()) filled += !is_null(row[c]);
    offer(t.column(c).name, 0, filled);
  }
  for (const auto& v : ctx->index->values()) offer(v.raw, 1, v.frequency);
  for (const auto& w : vocab_.entries()) offer(w, 2, 0);

  std::vector<Candidate> ranked;
  for (auto& [_, c] : found) ranked.push_back(std::move(c));
  std::sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.text < b.text;
  });
  if (ranked.size() > options_.max_suggestions) ranked.resize(options_.max_suggestions);
  static const char* kKinds[] = {"column", "value", "word"};
  json list = json::array();
  for (const auto& c : ranked) {
    list.push_back(
        {{"text", c.text}, {"kind", kKinds[c.priority]}, {"frequency", c.frequency}, {"completion", head + c.text}});
  }
  return {200, {{"version", kApiVersion}, {"table", id}, {"prefix", prefix}, {"suggestions", list}}};
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  explicit Impl(Service& s) : service(s) {}
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  Service& svc = impl_->service;
  srv.set_payload_max_length(svc.options().max_upload_bytes);
  srv.set_error_handler([&svc](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    std::string message = "request failed";
    if (res.status == 413) {
      message = "upload exceeds the limit of " + std::to_string(svc.options().max_upload_bytes) + " bytes";
    } else if (res.status == 404) {
      message = "not found";
    }
    res.set_content(json{{"version", kApiVersion}, {"error", message}}.dump(), "application/json");
  });
  srv.Get("/health", [&svc](const httplib::Request&, httplib::Response& res) { reply(res, svc.health()); });
  srv.Get("/tables", [&svc](const httplib::Request&, httplib::Response& res) { reply(res, svc.list_tables()); });
  srv.Post("/tables", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::string body = req.body;
    std::string name = req.has_param("name") ? req.get_param_value("name") : "";
    if (req.is_multipart_form_data() && req.has_file("file")) {
      const auto file = req.get_file_value("file");
      body = file.content;
      if (name.empty()) name = fs::path(file.filename).stem().string();
    }
    reply(res, svc.upload(body, name));
  });
  srv.Get(R"(/tables/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.describe(req.matches[1]));
  });
  srv.Post(R"(/tables/([^/]+)/ask)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.ask(req.matches[1], req.body));
  });
  srv.Get(R"(/tables/([^/]+)/suggest)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.suggest(req.matches[1], req.get_param_value("prefix")));
  });
  if (!svc.options().ui_dir.empty()) srv.set_mount_point("/ui", svc.options().ui_dir);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }
void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

int run_service(const Vocabulary& vocab, std::shared_ptr<const Scorer> scorer, const ServiceOptions& options) {
  Service service(vocab, std::move(scorer), options);
  HttpServer http(service);
  if (!http.bind(options.host, options.port)) {
    std::cerr << "cannot bind " << options.host << ":" << options.port << "\n";
    return 1;
  }
  std::cerr << "listening on http://" << options.host << ":" << options.port << "\n";
  http.listen();
  return 0;
}

}  // namespace tq
