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

#ifndef TABLEQUERY_TABLE_HPP_
#define TABLEQUERY_TABLE_HPP_

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tablequery/value.hpp"

namespace tq {

// Maximum number of columns a table may have; column sets are bitmasks.
inline constexpr int kMaxColumns = 64;

// A set of column indices of one table.
class ColumnSet {
 public:
  constexpr ColumnSet() = default;
  static constexpr ColumnSet single(int column) { return ColumnSet(uint64_t{1} << column); }
  static constexpr ColumnSet from_bits(uint64_t bits) { return ColumnSet(bits); }
  static constexpr ColumnSet all(int num_columns) {
    return ColumnSet(num_columns >= 64 ? ~uint64_t{0} : (uint64_t{1} << num_columns) - 1);
  }

  constexpr uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int column) const { return (bits_ >> column) & 1; }
  constexpr bool subset_of(ColumnSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(ColumnSet other) const { return (bits_ & other.bits_) != 0; }
  constexpr int first() const { return bits_ == 0 ? -1 : std::countr_zero(bits_); }
  constexpr void insert(int column) { bits_ |= uint64_t{1} << column; }

  constexpr ColumnSet operator|(ColumnSet o) const { return ColumnSet(bits_ | o.bits_); }
  constexpr ColumnSet operator&(ColumnSet o) const { return ColumnSet(bits_ & o.bits_); }
  constexpr auto operator<=>(const ColumnSet&) const = default;

  std::vector<int> indices() const;

 private:
  constexpr explicit ColumnSet(uint64_t bits) : bits_(bits) {}
  uint64_t bits_ = 0;
};

struct Column {
  std::string name;
  ColumnType type = ColumnType::kStr;
};

// An immutable single table with typed columns. Construction validates that
// column names are unique after normalization, that every row has one cell
// per column and that cell runtime types match the declared column types.
class Table {
 public:
  Table() = default;
  Table(std::string name, std::vector<Column> columns, std::vector<std::vector<Value>> rows);

  const std::string& name() const { return name_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Value>>& rows() const { return rows_; }
  int num_columns() const { return static_cast<int>(columns_.size()); }
  const Column& column(int i) const { return columns_[i]; }

  // Case- and whitespace-insensitive lookup.
  std::optional<int> column_index(std::string_view name) const;
  ColumnSet all_columns() const { return ColumnSet::all(num_columns()); }

  // CSV with a two-row header: names, then types from {str, num, date}.
  static Table from_csv(std::istream& in, std::string name);
  static Table load_csv(const std::string& path);
  void write_csv(std::ostream& out) const;

  // Parses one cell of the given type; empty text is NULL. Throws
  // ValidationError when the text does not fit the type.
  static Value parse_cell(std::string_view text, ColumnType type);

 private:
  std::string name_;
  std::vector<Column> columns_;
  std::vector<std::vector<Value>> rows_;
};

// Minimal RFC 4180 reader/writer helpers.
std::vector<std::vector<std::string>> read_csv_records(std::istream& in);
std::string csv_escape(std::string_view field);

}  // namespace tq

#endif  // TABLEQUERY_TABLE_HPP_
