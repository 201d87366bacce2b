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

#ifndef TABLEQUERY_UTTERANCE_HPP_
#define TABLEQUERY_UTTERANCE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tablequery/symbol.hpp"

namespace tq {

// Half-open character range into the original question.
struct CharSpan {
  size_t begin = 0;
  size_t end = 0;

  bool overlaps(const CharSpan& o) const { return begin < o.end && o.begin < end; }
  bool operator==(const CharSpan&) const = default;
};

struct Token {
  enum class Kind : uint8_t { kCommon, kUnknown, kSymbol };

  Kind kind = Kind::kUnknown;
  // Vocabulary entry for kCommon; the surface text otherwise.
  std::string word;
  std::optional<SymbolInstance> symbol;
  CharSpan source;

  static Token common(std::string entry, CharSpan source);
  static Token unknown(std::string text, CharSpan source);
  static Token of_symbol(SymbolInstance s, std::string text, CharSpan source);

  bool is_symbol() const { return kind == Kind::kSymbol; }
  bool operator==(const Token& other) const;
};

// One abstraction of a question: vocabulary words, UNK and symbols.
struct AbstractedUtterance {
  std::vector<Token> tokens;
  double annotation_score = 0;
  int unknown_count = 0;

  // Indices of symbol tokens, in order.
  std::vector<int> symbol_positions() const;
  // e.g. "UNK C by C"
  std::string render() const;
  bool operator==(const AbstractedUtterance& other) const { return tokens == other.tokens; }
};

}  // namespace tq

#endif  // TABLEQUERY_UTTERANCE_HPP_
