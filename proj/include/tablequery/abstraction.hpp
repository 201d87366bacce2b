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

#ifndef TABLEQUERY_ABSTRACTION_HPP_
#define TABLEQUERY_ABSTRACTION_HPP_

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tablequery/table.hpp"
#include "tablequery/utterance.hpp"
#include "tablequery/vocabulary.hpp"

namespace tq {

size_t levenshtein(std::string_view a, std::string_view b);
// 1 - levenshtein(a, b) / max(|a|, |b|); 1 for two empty strings.
double edit_similarity(std::string_view a, std::string_view b);

inline constexpr double kEditThreshold = 0.8;
inline constexpr double kSynonymScore = 0.9;
inline constexpr int kMaxNgram = 5;
inline constexpr size_t kMaxUtterances = 32;

enum class MatchKind : uint8_t { kExact, kEditDistance, kSynonym, kLiteral };

std::string_view match_kind_name(MatchKind kind);

struct Annotation {
  CharSpan span;
  // Word-piece range [first_piece, end_piece) of the normalizer's tokenization.
  size_t first_piece = 0;
  size_t end_piece = 0;
  SymbolInstance symbol;
  MatchKind match = MatchKind::kExact;
  double score = 1.0;
  std::string text;  // surface text of the span
};

// Read-only lookup structures for one table, built once.
class TableIndex {
 public:
  struct Entry {
    std::string key;    // lemmatized words, space separated
    std::string lower;  // lowercased, whitespace-collapsed surface form
    int words = 0;
  };
  struct ValueEntry : Entry {
    std::string raw;  // first spelling seen in the table
    ColumnSet cols;
    int frequency = 0;
  };

  TableIndex(std::shared_ptr<const Table> table, std::shared_ptr<const Normalizer> normalizer);

  const Table& table() const { return *table_; }
  std::shared_ptr<const Table> table_ptr() const { return table_; }
  const Normalizer& normalizer() const { return *normalizer_; }
  const Entry& table_entry() const { return table_entry_; }
  const std::vector<Entry>& column_entries() const { return columns_; }
  const std::vector<ValueEntry>& values() const { return values_; }
  // Inverted index from normalized cell text to the value entry.
  const ValueEntry* find_value(const std::string& key) const;
  const ValueEntry* find_value_text(std::string_view text) const;

  // Columns whose value range contains the literal: num columns for numbers,
  // date columns for dates and for integral years.
  ColumnSet columns_containing(const Value& literal) const;

 private:
  std::shared_ptr<const Table> table_;
  std::shared_ptr<const Normalizer> normalizer_;
  Entry table_entry_;
  std::vector<Entry> columns_;
  std::vector<ValueEntry> values_;
  std::unordered_map<std::string, size_t> value_by_key_;
  std::vector<std::optional<std::pair<double, double>>> num_range_;
  std::vector<std::optional<std::pair<Date, Date>>> date_range_;
};

// User-supplied phrase → table/column/value references. Reference syntax:
// `table`, `column:<name>`, `value:<column>=<text>`, or a bare name that is
// resolved against the table as column, table name, then cell value.
class SynonymDict {
 public:
  struct Item {
    std::string phrase;
    std::string reference;
  };

  static SynonymDict parse(std::istream& in);
  static SynonymDict load(const std::string& path);

  void add(std::string phrase, std::string reference);
  const std::vector<Item>& items() const { return items_; }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<Item> items_;
};

// Links n-grams (n = 1..5) of the question to the table: exact lemma matches
// first; for a table item without one, the best fuzzy n-gram above the
// threshold; then synonyms. N/D literals are added with columns bound.
// Result is sorted by (first_piece, end_piece, symbol).
std::vector<Annotation> annotate(std::string_view question, const TableIndex& index, const Vocabulary& vocab,
                                 const SynonymDict& synonyms);

// All maximal non-overlapping annotation subsets, rendered as utterances
// with remaining words mapped to common words or UNK. Ordered by total
// score (desc), then UNK count (asc); deduplicated; at most `cap` results.
std::vector<AbstractedUtterance> permute(std::string_view question, const std::vector<Annotation>& annotations,
                                         const Vocabulary& vocab, size_t cap = kMaxUtterances);

// annotate + permute.
std::vector<AbstractedUtterance> abstract_question(std::string_view question, const TableIndex& index,
                                                   const Vocabulary& vocab, const SynonymDict& synonyms);

}  // namespace tq

#endif  // TABLEQUERY_ABSTRACTION_HPP_
