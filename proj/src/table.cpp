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

#include "tablequery/table.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace tq {

std::vector<int> ColumnSet::indices() const {
  std::vector<int> out;
  for (uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

Table::Table(std::string name, std::vector<Column> columns, std::vector<std::vector<Value>> rows)
    : name_(std::move(name)), columns_(std::move(columns)), rows_(std::move(rows)) {
  if (columns_.empty()) throw ValidationError("table '" + name_ + "' has no columns");
  if (columns_.size() > static_cast<size_t>(kMaxColumns)) {
    throw ValidationError("table '" + name_ + "' has more than 64 columns");
  }
  std::set<std::string> seen;
  for (const Column& c : columns_) {
    const std::string key = normalize_text(c.name);
    if (key.empty()) throw ValidationError("table '" + name_ + "' has an empty column name");
    if (!seen.insert(key).second) {
      throw ValidationError("table '" + name_ + "' has duplicate column '" + c.name + "'");
    }
  }
  for (size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (row.size() != columns_.size()) {
      throw ValidationError("table '" + name_ + "' row " + std::to_string(r) + " has " +
                            std::to_string(row.size()) + " cells, expected " +
                            std::to_string(columns_.size()));
    }
    for (size_t c = 0; c < row.size(); ++c) {
      const Value& v = row[c];
      if (is_null(v)) continue;
      bool ok = false;
      switch (columns_[c].type) {
        case ColumnType::kStr: ok = std::holds_alternative<std::string>(v); break;
        case ColumnType::kNum: ok = std::holds_alternative<double>(v); break;
        case ColumnType::kDate: ok = std::holds_alternative<Date>(v); break;
      }
      if (!ok) {
        throw ValidationError("table '" + name_ + "' row " + std::to_string(r) + " column '" +
                              columns_[c].name + "' does not match type " +
                              std::string(to_string(columns_[c].type)));
      }
    }
  }
}

std::optional<int> Table::column_index(std::string_view name) const {
  const std::string key = normalize_text(name);
  for (int i = 0; i < num_columns(); ++i) {
    if (normalize_text(columns_[i].name) == key) return i;
  }
  return std::nullopt;
}

Value Table::parse_cell(std::string_view text, ColumnType type) {
  std::string trimmed = std::string(text);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.pop_back();
  size_t start = 0;
  while (start < trimmed.size() && std::isspace(static_cast<unsigned char>(trimmed[start]))) ++start;
  trimmed.erase(0, start);
  if (trimmed.empty()) return std::monostate{};
  switch (type) {
    case ColumnType::kStr: return trimmed;
    case ColumnType::kNum: {
      auto n = parse_number(trimmed);
      if (!n) throw ValidationError("'" + trimmed + "' is not a number");
      return *n;
    }
    case ColumnType::kDate: {
      auto d = Date::parse(trimmed);
      if (!d) throw ValidationError("'" + trimmed + "' is not an ISO date");
      return *d;
    }
  }
  return std::monostate{};
}

std::vector<std::vector<std::string>> read_csv_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  char c;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      // Swallowed; the following '\n' ends the record.
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw ValidationError("unterminated quoted CSV field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Table Table::from_csv(std::istream& in, std::string name) {
  auto records = read_csv_records(in);
  if (records.size() < 2) throw ValidationError("CSV table needs a name row and a type row");
  const auto& names = records[0];
  const auto& types = records[1];
  if (names.size() != types.size()) throw ValidationError("CSV header rows differ in width");
  std::vector<Column> columns;
  for (size_t i = 0; i < names.size(); ++i) {
    auto type = parse_column_type(types[i]);
    if (!type) throw ValidationError("unknown column type '" + types[i] + "'");
    columns.push_back({names[i], *type});
  }
  std::vector<std::vector<Value>> rows;
  for (size_t r = 2; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != columns.size()) {
      throw ValidationError("CSV row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
                            " fields, expected " + std::to_string(columns.size()));
    }
    std::vector<Value> row;
    row.reserve(rec.size());
    for (size_t c = 0; c < rec.size(); ++c) row.push_back(parse_cell(rec[c], columns[c].type));
    rows.push_back(std::move(row));
  }
  return Table(std::move(name), std::move(columns), std::move(rows));
}

Table Table::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open table file " + path);
  return from_csv(in, std::filesystem::path(path).stem().string());
}

void Table::write_csv(std::ostream& out) const {
  for (int i = 0; i < num_columns(); ++i) out << (i ? "," : "") << csv_escape(columns_[i].name);
  out << "\n";
  for (int i = 0; i < num_columns(); ++i) out << (i ? "," : "") << to_string(columns_[i].type);
  out << "\n";
  for (const auto& row : rows_) {
    for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_escape(value_text(row[c]));
    out << "\n";
  }
}

}  // namespace tq
