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

#ifndef TABLEQUERY_VOCABULARY_HPP_
#define TABLEQUERY_VOCABULARY_HPP_

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tablequery/symbol.hpp"
#include "tablequery/utterance.hpp"

namespace tq {

// One word of a question with its position.
struct WordPiece {
  std::string text;   // as written
  std::string lower;  // lowercased
  CharSpan span;
};

// Language-specific tokenization and lemmatization.
class Normalizer {
 public:
  virtual ~Normalizer() = default;
  // Offsets strictly increase and stay inside `text`.
  virtual std::vector<WordPiece> tokenize(std::string_view text) const = 0;
  // Idempotent: lemmatize(lemmatize(w)) == lemmatize(w).
  virtual std::string lemmatize(std::string_view word) const = 0;

  // Lemmas of all words of `text`, space separated.
  std::string normalize_phrase(std::string_view text) const;
};

// Rule-based suffix stripping for English (plural, -ing, -ed, -er, -est).
class EnglishNormalizer : public Normalizer {
 public:
  std::vector<WordPiece> tokenize(std::string_view text) const override;
  std::string lemmatize(std::string_view word) const override;
};

std::shared_ptr<const Normalizer> english_normalizer();

enum class WordGroup : uint8_t { kStopping, kAggregation, kOperation, kComparison };

std::string_view group_name(WordGroup g);

// Closed per-language vocabulary of data-analysis common words. Every
// other word of a question becomes a symbol or UNK.
class Vocabulary {
 public:
  // File format: UTF-8, one token per line, sections introduced by
  // `#stopping`, `#aggregation`, `#operation`, `#comparison`. Lines starting
  // with "# " are comments.
  static Vocabulary parse(std::istream& in, std::shared_ptr<const Normalizer> normalizer,
                          std::string language = "en");
  static Vocabulary load(const std::string& path, std::shared_ptr<const Normalizer> normalizer,
                         std::string language = "en");
  // The shipped English vocabulary under the data directory.
  static Vocabulary load_default();

  // `word` is a lowercased word; returns the vocabulary entry whose lemma
  // equals the word's lemma.
  std::optional<std::string> lookup_common(std::string_view word) const;
  std::optional<WordGroup> group_of(std::string_view entry) const;

  const std::vector<std::string>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  const std::string& language() const { return language_; }
  const Normalizer& normalizer() const { return *normalizer_; }
  std::shared_ptr<const Normalizer> normalizer_ptr() const { return normalizer_; }

 private:
  std::string language_;
  std::shared_ptr<const Normalizer> normalizer_;
  std::vector<std::string> entries_;
  std::vector<WordGroup> groups_;
  std::unordered_map<std::string, size_t> by_lemma_;
  std::unordered_map<std::string, size_t> by_entry_;
};

// A number (N) or date (D) found in a question. Pieces are indices into the
// normalizer's tokenization.
struct LiteralMatch {
  CharSpan span;
  size_t first_piece = 0;
  size_t end_piece = 0;
  SymbolInstance symbol;
};

// Recognized patterns: integers, decimals, digit-grouped numbers; dates as
// YYYY, YYYY-MM-DD, "Month DD, YYYY" and DD/MM/YYYY. Four-digit integers in
// [1900, 2100] are returned twice, as N and as D over the same span. Spans
// are otherwise disjoint. Column sets are left empty.
std::vector<LiteralMatch> recognize_literals(const std::vector<WordPiece>& pieces);
std::vector<LiteralMatch> recognize_literals(std::string_view question, std::string_view language = "en");

// Data directory: $TQ_DATA_DIR if set, else the build-time default.
std::string data_dir();

}  // namespace tq

#endif  // TABLEQUERY_VOCABULARY_HPP_
