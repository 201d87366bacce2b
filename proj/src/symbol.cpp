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

#include "tablequery/symbol.hpp"

#include <tuple>

namespace tq {

char kind_letter(SymbolKind kind) {
  static constexpr char kLetters[] = {'T', 'C', 'V', 'N', 'D', 'A', 'G', 'F', 'S'};
  return kLetters[static_cast<int>(kind)];
}

std::optional<SymbolKind> kind_from_letter(char letter) {
  switch (letter) {
    case 'T': return SymbolKind::kT;
    case 'C': return SymbolKind::kC;
    case 'V': return SymbolKind::kV;
    case 'N': return SymbolKind::kN;
    case 'D': return SymbolKind::kD;
    case 'A': return SymbolKind::kA;
    case 'G': return SymbolKind::kG;
    case 'F': return SymbolKind::kF;
    case 'S': return SymbolKind::kS;
    default: return std::nullopt;
  }
}

bool is_metadata_kind(SymbolKind kind) { return static_cast<int>(kind) <= static_cast<int>(SymbolKind::kD); }

SymbolInstance SymbolInstance::table(const Table& t) {
  SymbolInstance s;
  s.kind = SymbolKind::kT;
  s.cols = t.all_columns();
  return s;
}

SymbolInstance SymbolInstance::column(const Table& t, int column) {
  SymbolInstance s;
  s.kind = SymbolKind::kC;
  s.cols = ColumnSet::single(column);
  s.type = t.column(column).type;
  return s;
}

bool SymbolInstance::operator==(const SymbolInstance& other) const {
  if (kind != other.kind || cols != other.cols || type != other.type) return false;
  if (value.has_value() != other.value.has_value()) return false;
  return !value || value_equal(*value, *other.value);
}

bool SymbolInstance::operator<(const SymbolInstance& other) const {
  if (kind != other.kind) return kind < other.kind;
  if (cols != other.cols) return cols < other.cols;
  if (type != other.type) return type < other.type;
  if (value.has_value() != other.value.has_value()) return !value.has_value();
  return value && value_less(*value, *other.value);
}

std::string SymbolInstance::signature() const {
  std::string out(1, kind_letter(kind));
  out += "{";
  bool first = true;
  for (int c : cols.indices()) {
    if (!first) out += ",";
    out += std::to_string(c);
    first = false;
  }
  out += "}";
  if (type) {
    out += ":";
    out += to_string(*type);
  }
  if (value) {
    out += "=";
    if (std::holds_alternative<std::string>(*value)) {
      out += "'" + value_text(*value) + "'";
    } else {
      out += value_text(*value);
    }
  }
  return out;
}

void validate_symbol(const SymbolInstance& s, const Table& t) {
  if (!s.cols.subset_of(t.all_columns())) {
    throw ValidationError(s.signature() + " names a column outside table '" + t.name() + "'");
  }
  const bool wants_value = s.kind == SymbolKind::kV || s.kind == SymbolKind::kN || s.kind == SymbolKind::kD;
  if (wants_value != s.value.has_value()) {
    throw ValidationError(s.signature() + (wants_value ? " is missing its value" : " must not carry a value"));
  }
  if ((s.kind == SymbolKind::kC) == false && s.type.has_value()) {
    throw ValidationError(s.signature() + " must not carry a type");
  }
  if (s.kind == SymbolKind::kC) {
    if (s.cols.empty()) throw ValidationError("C symbol without columns");
    if (s.cols.size() == 1 && s.type != t.column(s.cols.first()).type) {
      throw ValidationError(s.signature() + " type differs from its column");
    }
  }
  if (s.kind == SymbolKind::kV && s.cols.empty()) throw ValidationError("V symbol without columns");
}

}  // namespace tq
