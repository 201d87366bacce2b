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

#ifndef TABLEQUERY_SYMBOL_HPP_
#define TABLEQUERY_SYMBOL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tablequery/table.hpp"
#include "tablequery/value.hpp"

namespace tq {

// Meta-data symbols T, C, V, N, D and operator symbols A, G, F, S.
enum class SymbolKind : uint8_t { kT, kC, kV, kN, kD, kA, kG, kF, kS };

inline constexpr int kNumSymbolKinds = 9;

char kind_letter(SymbolKind kind);
std::optional<SymbolKind> kind_from_letter(char letter);
bool is_metadata_kind(SymbolKind kind);

// A typed symbol with its property record. `type` is set only for C,
// `value` only for V, N and D.
struct SymbolInstance {
  SymbolKind kind = SymbolKind::kT;
  ColumnSet cols;
  std::optional<ColumnType> type;
  std::optional<Value> value;

  static SymbolInstance table(const Table& t);
  static SymbolInstance column(const Table& t, int column);

  bool operator==(const SymbolInstance& other) const;
  // Strict weak order over (kind, cols, type, value); used as the chart
  // property signature.
  bool operator<(const SymbolInstance& other) const;

  // Compact text such as C{1}:num or V{0}='BMW'.
  std::string signature() const;
};

// Throws ValidationError if the instance breaks its kind's property rules
// or names columns that are not in `t`.
void validate_symbol(const SymbolInstance& s, const Table& t);

}  // namespace tq

#endif  // TABLEQUERY_SYMBOL_HPP_
