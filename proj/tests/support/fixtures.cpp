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

#include "support.hpp"

#include <fstream>
#include <mutex>
#include <stdexcept>

namespace tqt {

const tq::Vocabulary& vocab() {
  static const tq::Vocabulary v = tq::Vocabulary::load_default();
  return v;
}

const std::map<std::string, std::shared_ptr<const tq::TableContext>>& toy_tables() {
  static const auto tables = tq::builtin_tables(vocab());
  return tables;
}

const tq::TableContext& toy(const std::string& name) {
  const auto& tables = toy_tables();
  auto it = tables.find(name);
  if (it == tables.end()) throw std::out_of_range("no toy table " + name);
  return *it->second;
}

std::string data_dir() { return tq::data_dir(); }

std::string schema_dir() { return TQ_SCHEMA_DIR; }

const nlohmann::json& schema(const std::string& file) {
  static std::mutex mu;
  static std::map<std::string, nlohmann::json> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(file);
  if (it == cache.end()) {
    std::ifstream in(schema_dir() + "/" + file);
    if (!in) throw std::runtime_error("cannot open schema " + file);
    it = cache.emplace(file, nlohmann::json::parse(in)).first;
  }
  return it->second;
}

}  // namespace tqt
