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

#include "tablequery/abstraction.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <tuple>

namespace tq {

size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  const size_t m = std::max(a.size(), b.size());
  if (m == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(m);
}

std::string_view match_kind_name(MatchKind kind) {
  switch (kind) {
    case MatchKind::kExact: return "exact";
    case MatchKind::kEditDistance: return "edit_distance";
    case MatchKind::kSynonym: return "synonym";
    case MatchKind::kLiteral: return "literal";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// TableIndex

namespace {

template <typename E>
void fill_entry(E& e, std::string_view text, const Normalizer& norm) {
  const auto pieces = norm.tokenize(text);
  e.key.clear();
  e.lower.clear();
  for (const WordPiece& p : pieces) {
    if (!e.key.empty()) {
      e.key.push_back(' ');
      e.lower.push_back(' ');
    }
    e.key += norm.lemmatize(p.lower);
    e.lower += p.lower;
  }
  e.words = static_cast<int>(pieces.size());
}

}  // namespace

TableIndex::TableIndex(std::shared_ptr<const Table> table, std::shared_ptr<const Normalizer> normalizer)
    : table_(std::move(table)), normalizer_(std::move(normalizer)) {
  const Table& t = *table_;
  fill_entry(table_entry_, t.name(), *normalizer_);
  columns_.resize(t.num_columns());
  num_range_.resize(t.num_columns());
  date_range_.resize(t.num_columns());
  for (int c = 0; c < t.num_columns(); ++c) fill_entry(columns_[c], t.column(c).name, *normalizer_);
  for (const auto& row : t.rows()) {
    for (int c = 0; c < t.num_columns(); ++c) {
      const Value& v = row[c];
      if (is_null(v)) continue;
      switch (t.column(c).type) {
        case ColumnType::kNum: {
          const double x = std::get<double>(v);
          auto& r = num_range_[c];
          r = r ? std::pair{std::min(r->first, x), std::max(r->second, x)} : std::pair{x, x};
          break;
        }
        case ColumnType::kDate: {
          const Date& d = std::get<Date>(v);
          auto& r = date_range_[c];
          r = r ? std::pair{std::min(r->first, d), std::max(r->second, d)} : std::pair{d, d};
          break;
        }
        case ColumnType::kStr: {
          const std::string& s = std::get<std::string>(v);
          ValueEntry probe;
          fill_entry(probe, s, *normalizer_);
          if (probe.key.empty()) break;
          auto [it, inserted] = value_by_key_.emplace(probe.key, values_.size());
          if (inserted) {
            probe.raw = s;
            values_.push_back(std::move(probe));
          }
          values_[it->second].cols.insert(c);
          values_[it->second].frequency += 1;
          break;
        }
      }
    }
  }
}

const TableIndex::ValueEntry* TableIndex::find_value(const std::string& key) const {
  auto it = value_by_key_.find(key);
  return it == value_by_key_.end() ? nullptr : &values_[it->second];
}

const TableIndex::ValueEntry* TableIndex::find_value_text(std::string_view text) const {
  return find_value(normalizer_->normalize_phrase(text));
}

ColumnSet TableIndex::columns_containing(const Value& literal) const {
  ColumnSet out;
  for (int c = 0; c < table_->num_columns(); ++c) {
    if (const double* x = std::get_if<double>(&literal)) {
      if (num_range_[c] && num_range_[c]->first <= *x && *x <= num_range_[c]->second) out.insert(c);
      const bool year_like = *x == static_cast<double>(static_cast<int>(*x)) && *x >= 1000 && *x <= 9999;
      if (year_like && date_range_[c] && date_range_[c]->first.year <= *x && *x <= date_range_[c]->second.year) {
        out.insert(c);
      }
    } else if (const Date* d = std::get_if<Date>(&literal)) {
      if (date_range_[c] && compare_date_prefix(date_range_[c]->first, *d) <= 0 &&
          compare_date_prefix(*d, date_range_[c]->second) <= 0) {
        out.insert(c);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SynonymDict

SynonymDict SynonymDict::parse(std::istream& in) {
  SynonymDict d;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (normalize_text(line).empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError("synonym line " + std::to_string(line_no) + ": expected phrase<TAB>reference");
    }
    d.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return d;
}

SynonymDict SynonymDict::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open synonym file " + path);
  return parse(in);
}

void SynonymDict::add(std::string phrase, std::string reference) {
  phrase = normalize_text(phrase);
  if (phrase.empty()) return;
  items_.push_back({std::move(phrase), std::string(reference)});
}

// ---------------------------------------------------------------------------
// annotate

namespace {

struct Ngram {
  size_t first = 0;
  size_t end = 0;
  std::string key;
  std::string lower;
  bool has_literal = false;
  bool all_stopping = false;
};

enum class ItemKind : uint8_t { kTable, kColumn, kValue };

struct Item {
  ItemKind kind;
  size_t id;
  bool operator<(const Item& o) const { return std::tie(kind, id) < std::tie(o.kind, o.id); }
};

std::optional<Item> resolve_reference(const TableIndex& index, std::string_view ref, ColumnSet* restrict_cols) {
  const Table& t = index.table();
  const std::string lower = normalize_text(ref);
  if (lower == "table") return Item{ItemKind::kTable, 0};
  if (lower.rfind("column:", 0) == 0) {
    auto c = t.column_index(std::string_view(ref).substr(ref.find(':') + 1));
    if (!c) return std::nullopt;
    return Item{ItemKind::kColumn, static_cast<size_t>(*c)};
  }
  if (lower.rfind("value:", 0) == 0) {
    std::string_view rest = std::string_view(ref).substr(ref.find(':') + 1);
    const size_t eq = rest.find('=');
    if (eq == std::string_view::npos) return std::nullopt;
    auto c = t.column_index(rest.substr(0, eq));
    const TableIndex::ValueEntry* v = index.find_value_text(rest.substr(eq + 1));
    if (!c || v == nullptr || !v->cols.contains(*c)) return std::nullopt;
    *restrict_cols = ColumnSet::single(*c);
    return Item{ItemKind::kValue, static_cast<size_t>(v - index.values().data())};
  }
  if (auto c = t.column_index(ref)) return Item{ItemKind::kColumn, static_cast<size_t>(*c)};
  if (lower == normalize_text(t.name())) return Item{ItemKind::kTable, 0};
  if (const TableIndex::ValueEntry* v = index.find_value_text(ref)) {
    return Item{ItemKind::kValue, static_cast<size_t>(v - index.values().data())};
  }
  return std::nullopt;
}

SymbolInstance item_symbol(const TableIndex& index, const Item& item, ColumnSet restrict_cols) {
  const Table& t = index.table();
  switch (item.kind) {
    case ItemKind::kTable: return SymbolInstance::table(t);
    case ItemKind::kColumn: return SymbolInstance::column(t, static_cast<int>(item.id));
    case ItemKind::kValue: break;
  }
  const TableIndex::ValueEntry& v = index.values()[item.id];
  SymbolInstance s;
  s.kind = SymbolKind::kV;
  s.cols = restrict_cols.empty() ? v.cols : restrict_cols;
  s.value = Value(v.raw);
  return s;
}

const TableIndex::Entry& item_entry(const TableIndex& index, const Item& item) {
  switch (item.kind) {
    case ItemKind::kTable: return index.table_entry();
    case ItemKind::kColumn: return index.column_entries()[item.id];
    case ItemKind::kValue: break;
  }
  return index.values()[item.id];
}

}  // namespace

std::vector<Annotation> annotate(std::string_view question, const TableIndex& index, const Vocabulary& vocab,
                                 const SynonymDict& synonyms) {
  const Normalizer& norm = index.normalizer();
  const std::vector<WordPiece> pieces = norm.tokenize(question);
  const std::vector<LiteralMatch> literals = recognize_literals(pieces);

  std::vector<std::string> lemmas;
  std::vector<bool> literal_piece(pieces.size(), false);
  std::vector<bool> stopping(pieces.size(), false);
  for (size_t i = 0; i < pieces.size(); ++i) {
    lemmas.push_back(norm.lemmatize(pieces[i].lower));
    if (auto w = vocab.lookup_common(pieces[i].lower)) stopping[i] = vocab.group_of(*w) == WordGroup::kStopping;
  }
  for (const LiteralMatch& m : literals) {
    for (size_t i = m.first_piece; i < m.end_piece; ++i) literal_piece[i] = true;
  }

  // n-grams grouped by word count.
  std::vector<std::vector<Ngram>> ngrams(kMaxNgram + 1);
  for (size_t i = 0; i < pieces.size(); ++i) {
    Ngram g;
    g.first = i;
    g.all_stopping = true;
    for (size_t n = 1; n <= static_cast<size_t>(kMaxNgram) && i + n <= pieces.size(); ++n) {
      const size_t j = i + n - 1;
      if (n > 1) {
        g.key.push_back(' ');
        g.lower.push_back(' ');
      }
      g.key += lemmas[j];
      g.lower += pieces[j].lower;
      g.has_literal = g.has_literal || literal_piece[j];
      g.all_stopping = g.all_stopping && stopping[j];
      g.end = j + 1;
      ngrams[n].push_back(g);
    }
  }

  std::vector<Annotation> out;
  auto emit = [&](const Ngram& g, SymbolInstance symbol, MatchKind kind, double score) {
    Annotation a;
    a.first_piece = g.first;
    a.end_piece = g.end;
    a.span = {pieces[g.first].span.begin, pieces[g.end - 1].span.end};
    a.text = std::string(question.substr(a.span.begin, a.span.end - a.span.begin));
    a.symbol = std::move(symbol);
    a.match = kind;
    a.score = score;
    out.push_back(std::move(a));
  };

  // Every table item, in a fixed order.
  std::vector<Item> items;
  if (!index.table_entry().key.empty()) items.push_back({ItemKind::kTable, 0});
  for (size_t c = 0; c < index.column_entries().size(); ++c) items.push_back({ItemKind::kColumn, c});
  for (size_t v = 0; v < index.values().size(); ++v) items.push_back({ItemKind::kValue, v});

  std::unordered_map<std::string, std::vector<size_t>> items_by_key;
  for (size_t k = 0; k < items.size(); ++k) {
    const auto& e = item_entry(index, items[k]);
    if (!e.key.empty() && e.words <= kMaxNgram) items_by_key[e.key].push_back(k);
  }

  // Exact matches.
  std::vector<bool> matched(items.size(), false);
  for (int n = 1; n <= kMaxNgram; ++n) {
    for (const Ngram& g : ngrams[n]) {
      auto it = items_by_key.find(g.key);
      if (it == items_by_key.end()) continue;
      for (size_t k : it->second) {
        if (items[k].kind == ItemKind::kValue && g.all_stopping) continue;
        matched[k] = true;
        emit(g, item_symbol(index, items[k], {}), MatchKind::kExact, 1.0);
      }
    }
  }

  // Fuzzy matches for items without an exact one.
  for (size_t k = 0; k < items.size(); ++k) {
    if (matched[k]) continue;
    const TableIndex::Entry& e = item_entry(index, items[k]);
    if (e.words < 1 || e.words > kMaxNgram || e.lower.empty()) continue;
    double best = kEditThreshold;
    std::vector<const Ngram*> winners;
    const double len = static_cast<double>(e.lower.size());
    for (const Ngram& g : ngrams[e.words]) {
      if (g.has_literal || g.all_stopping) continue;
      const double glen = static_cast<double>(g.lower.size());
      // Upper bound on the similarity from the length difference alone.
      const double bound = 1.0 - std::abs(glen - len) / std::max(glen, len);
      if (bound <= kEditThreshold || bound < best) continue;
      const double s = edit_similarity(g.lower, e.lower);
      if (s > best) {
        best = s;
        winners.assign(1, &g);
      } else if (s == best && !winners.empty()) {
        winners.push_back(&g);
      }
    }
    for (const Ngram* g : winners) emit(*g, item_symbol(index, items[k], {}), MatchKind::kEditDistance, best);
    if (!winners.empty()) matched[k] = true;
  }

  // Synonyms for items still unmatched.
  for (const SynonymDict::Item& syn : synonyms.items()) {
    ColumnSet restrict_cols;
    auto item = resolve_reference(index, syn.reference, &restrict_cols);
    if (!item) continue;
    auto pos = std::find_if(items.begin(), items.end(),
                            [&](const Item& x) { return x.kind == item->kind && x.id == item->id; });
    if (pos == items.end() || matched[pos - items.begin()]) continue;
    const std::string key = norm.normalize_phrase(syn.phrase);
    for (int n = 1; n <= kMaxNgram; ++n) {
      for (const Ngram& g : ngrams[n]) {
        if (g.key == key) emit(g, item_symbol(index, *item, restrict_cols), MatchKind::kSynonym, kSynonymScore);
      }
    }
  }

  for (const LiteralMatch& m : literals) {
    Ngram g;
    g.first = m.first_piece;
    g.end = m.end_piece;
    SymbolInstance s = m.symbol;
    s.cols = index.columns_containing(*s.value);
    emit(g, std::move(s), MatchKind::kLiteral, 1.0);
  }

  // Sort and drop duplicates of the same symbol on the same span, keeping
  // the best score.
  std::stable_sort(out.begin(), out.end(), [](const Annotation& a, const Annotation& b) {
    if (a.first_piece != b.first_piece) return a.first_piece < b.first_piece;
    if (a.end_piece != b.end_piece) return a.end_piece < b.end_piece;
    if (!(a.symbol == b.symbol)) return a.symbol < b.symbol;
    return a.score > b.score;
  });
  std::vector<Annotation> unique;
  for (Annotation& a : out) {
    if (!unique.empty() && unique.back().first_piece == a.first_piece && unique.back().end_piece == a.end_piece &&
        unique.back().symbol == a.symbol) {
      continue;
    }
    unique.push_back(std::move(a));
  }
  return unique;
}

// ---------------------------------------------------------------------------
// permute

namespace {

constexpr size_t kMaxSetsPerComponent = 4096;

bool overlaps(const Annotation& a, const Annotation& b) {
  return a.first_piece < b.end_piece && b.first_piece < a.end_piece;
}

struct Choice {
  std::vector<size_t> chosen;  // annotation indices
  double score = 0;
  int unknown = 0;
};

bool better(const Choice& a, const Choice& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.unknown != b.unknown) return a.unknown < b.unknown;
  return a.chosen < b.chosen;
}

// Maximal independent sets of the overlap graph restricted to `members`.
void enumerate_maximal(const std::vector<Annotation>& anns, const std::vector<size_t>& members, size_t pos,
                       std::vector<size_t>& chosen, std::vector<std::vector<size_t>>& out) {
  if (out.size() >= kMaxSetsPerComponent) return;
  if (pos == members.size()) {
    for (size_t m : members) {
      if (std::find(chosen.begin(), chosen.end(), m) != chosen.end()) continue;
      const bool blocked =
          std::any_of(chosen.begin(), chosen.end(), [&](size_t c) { return overlaps(anns[c], anns[m]); });
      if (!blocked) return;  // not maximal
    }
    out.push_back(chosen);
    return;
  }
  const size_t m = members[pos];
  const bool free = std::none_of(chosen.begin(), chosen.end(), [&](size_t c) { return overlaps(anns[c], anns[m]); });
  if (free) {
    chosen.push_back(m);
    enumerate_maximal(anns, members, pos + 1, chosen, out);
    chosen.pop_back();
  }
  enumerate_maximal(anns, members, pos + 1, chosen, out);
}

}  // namespace

std::vector<AbstractedUtterance> permute(std::string_view question, const std::vector<Annotation>& annotations,
                                         const Vocabulary& vocab, size_t cap) {
  const std::vector<WordPiece> pieces = vocab.normalizer().tokenize(question);
  std::vector<std::optional<std::string>> common(pieces.size());
  for (size_t i = 0; i < pieces.size(); ++i) common[i] = vocab.lookup_common(pieces[i].lower);

  std::vector<size_t> order(annotations.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return annotations[a].first_piece < annotations[b].first_piece;
  });

  // Connected components of the overlap relation (intervals, so a sweep).
  std::vector<std::vector<size_t>> components;
  size_t reach = 0;
  for (size_t idx : order) {
    const Annotation& a = annotations[idx];
    if (a.end_piece > pieces.size() || a.first_piece >= a.end_piece) {
      throw ValidationError("annotation outside the question: " + a.text);
    }
    if (components.empty() || a.first_piece >= reach) {
      components.emplace_back();
      reach = 0;
    }
    components.back().push_back(idx);
    reach = std::max(reach, a.end_piece);
  }

  auto unknown_in = [&](size_t begin, size_t end, const std::vector<size_t>& chosen) {
    int n = 0;
    for (size_t i = begin; i < end; ++i) {
      const bool covered = std::any_of(chosen.begin(), chosen.end(), [&](size_t c) {
        return annotations[c].first_piece <= i && i < annotations[c].end_piece;
      });
      if (!covered && !common[i]) ++n;
    }
    return n;
  };

  const size_t beam = std::max<size_t>(cap * 4, 1);
  std::vector<Choice> partial(1);
  for (const auto& comp : components) {
    size_t lo = pieces.size(), hi = 0;
    for (size_t m : comp) {
      lo = std::min(lo, annotations[m].first_piece);
      hi = std::max(hi, annotations[m].end_piece);
    }
    std::vector<std::vector<size_t>> sets;
    std::vector<size_t> chosen;
    enumerate_maximal(annotations, comp, 0, chosen, sets);
    std::vector<Choice> next;
    for (const Choice& p : partial) {
      for (const auto& s : sets) {
        Choice c = p;
        for (size_t m : s) {
          c.chosen.push_back(m);
          c.score += annotations[m].score;
        }
        c.unknown += unknown_in(lo, hi, s);
        next.push_back(std::move(c));
      }
    }
    std::sort(next.begin(), next.end(), better);
    if (next.size() > beam) next.resize(beam);
    partial = std::move(next);
  }

  std::vector<AbstractedUtterance> out;
  for (Choice& c : partial) {
    std::sort(c.chosen.begin(), c.chosen.end(),
              [&](size_t a, size_t b) { return annotations[a].first_piece < annotations[b].first_piece; });
    AbstractedUtterance u;
    size_t next_ann = 0;
    for (size_t i = 0; i < pieces.size();) {
      if (next_ann < c.chosen.size() && annotations[c.chosen[next_ann]].first_piece == i) {
        const Annotation& a = annotations[c.chosen[next_ann++]];
        u.tokens.push_back(Token::of_symbol(a.symbol, a.text, a.span));
        i = a.end_piece;
        continue;
      }
      if (common[i]) {
        u.tokens.push_back(Token::common(*common[i], pieces[i].span));
      } else {
        u.tokens.push_back(Token::unknown(pieces[i].text, pieces[i].span));
        ++u.unknown_count;
      }
      ++i;
    }
    u.annotation_score = c.score;
    if (u.tokens.empty()) continue;
    if (std::find(out.begin(), out.end(), u) != out.end()) continue;
    out.push_back(std::move(u));
    if (out.size() >= cap) break;
  }
  return out;
}

std::vector<AbstractedUtterance> abstract_question(std::string_view question, const TableIndex& index,
                                                   const Vocabulary& vocab, const SynonymDict& synonyms) {
  return permute(question, annotate(question, index, vocab, synonyms), vocab);
}

}  // namespace tq
