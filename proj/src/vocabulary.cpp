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

#include "tablequery/vocabulary.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>

namespace tq {

namespace {

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Drops one letter of a trailing double consonant other than l, s, z.
std::string undouble(std::string stem) {
  const size_t n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && is_alpha(stem[n - 1]) && !is_vowel(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
    stem.pop_back();
  }
  return stem;
}

// One suffix-stripping step; returns the input unchanged when no rule fires.
std::string strip_once(const std::string& w) {
  constexpr size_t kMinStem = 3;
  auto stem_of = [&](std::string_view suffix) { return w.substr(0, w.size() - suffix.size()); };
  auto long_enough = [&](std::string_view suffix) { return w.size() >= suffix.size() + kMinStem; };
  if (ends_with(w, "'s")) return stem_of("'s");
  if (ends_with(w, "ies") && long_enough("ies")) return stem_of("ies") + "y";
  if (ends_with(w, "iest") && long_enough("iest")) return stem_of("iest") + "y";
  if (ends_with(w, "ier") && long_enough("ier")) return stem_of("ier") + "y";
  if (ends_with(w, "sses") && long_enough("sses")) return stem_of("es");
  for (std::string_view suf : {"xes", "ches", "shes", "zes"}) {
    if (ends_with(w, suf) && long_enough(suf)) return stem_of("es");
  }
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") && long_enough("s")) {
    return stem_of("s");
  }
  if (ends_with(w, "ing") && long_enough("ing")) return undouble(stem_of("ing"));
  if (ends_with(w, "ed") && !ends_with(w, "eed") && long_enough("ed")) return undouble(stem_of("ed"));
  if (ends_with(w, "est") && long_enough("est")) return undouble(stem_of("est"));
  if (ends_with(w, "er") && long_enough("er")) return undouble(stem_of("er"));
  if (ends_with(w, "e") && w.size() > 3 && is_alpha(w[w.size() - 2])) return stem_of("e");
  return w;
}

}  // namespace

std::string Normalizer::normalize_phrase(std::string_view text) const {
  std::string out;
  for (const WordPiece& p : tokenize(text)) {
    if (!out.empty()) out.push_back(' ');
    out += lemmatize(p.lower);
  }
  return out;
}

std::vector<WordPiece> EnglishNormalizer::tokenize(std::string_view text) const {
  std::vector<WordPiece> out;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    if (!is_word_byte(text[i])) {
      ++i;
      continue;
    }
    size_t j = i + 1;
    while (j < n) {
      if (is_word_byte(text[j])) {
        ++j;
        continue;
      }
      // Joiners stay inside a word when flanked by word characters:
      // "3,000", "2.5", "2009-05-12", "12/05/2009", "t-shirt", "shark's".
      const char c = text[j];
      if (j + 1 < n && is_word_byte(text[j + 1]) && is_word_byte(text[j - 1])) {
        const bool digits = is_digit(text[j - 1]) && is_digit(text[j + 1]);
        if (c == ',' && digits) {
          ++j;
          continue;
        }
        if (c == '/' && digits) {
          ++j;
          continue;
        }
        if (c == '.' || c == '-' || c == '\'') {
          ++j;
          continue;
        }
      }
      break;
    }
    WordPiece p;
    p.text = std::string(text.substr(i, j - i));
    p.lower = to_lower(p.text);
    p.span = {i, j};
    out.push_back(std::move(p));
    i = j;
  }
  return out;
}

std::string EnglishNormalizer::lemmatize(std::string_view word) const {
  std::string w = to_lower(word);
  for (int guard = 0; guard < 32; ++guard) {
    std::string next = strip_once(w);
    if (next == w) break;
    w = std::move(next);
  }
  return w;
}

std::shared_ptr<const Normalizer> english_normalizer() {
  static const auto kInstance = std::make_shared<EnglishNormalizer>();
  return kInstance;
}

std::string_view group_name(WordGroup g) {
  switch (g) {
    case WordGroup::kStopping: return "stopping";
    case WordGroup::kAggregation: return "aggregation";
    case WordGroup::kOperation: return "operation";
    case WordGroup::kComparison: return "comparison";
  }
  return "?";
}

Vocabulary Vocabulary::parse(std::istream& in, std::shared_ptr<const Normalizer> normalizer, std::string language) {
  Vocabulary v;
  v.language_ = std::move(language);
  v.normalizer_ = std::move(normalizer);
  std::optional<WordGroup> group;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string word = normalize_text(line);
    if (word.empty()) continue;
    if (word[0] == '#') {
      if (word == "#stopping") {
        group = WordGroup::kStopping;
      } else if (word == "#aggregation") {
        group = WordGroup::kAggregation;
      } else if (word == "#operation") {
        group = WordGroup::kOperation;
      } else if (word == "#comparison") {
        group = WordGroup::kComparison;
      } else if (word.size() > 1 && word[1] != ' ') {
        throw ValidationError("vocabulary line " + std::to_string(line_no) + ": unknown section '" + word + "'");
      }
      continue;
    }
    if (!group) throw ValidationError("vocabulary line " + std::to_string(line_no) + ": token before any section");
    if (word.find(' ') != std::string::npos) {
      throw ValidationError("vocabulary line " + std::to_string(line_no) + ": tokens are single words");
    }
    const std::string lemma = v.normalizer_->lemmatize(word);
    if (auto it = v.by_lemma_.find(lemma); it != v.by_lemma_.end()) {
      if (v.groups_[it->second] != *group) {
        throw ValidationError("vocabulary token '" + word + "' appears in groups " +
                              std::string(group_name(v.groups_[it->second])) + " and " +
                              std::string(group_name(*group)));
      }
      continue;  // inflected duplicate of an existing entry
    }
    v.by_lemma_.emplace(lemma, v.entries_.size());
    v.by_entry_.emplace(word, v.entries_.size());
    v.entries_.push_back(word);
    v.groups_.push_back(*group);
  }
  return v;
}

Vocabulary Vocabulary::load(const std::string& path, std::shared_ptr<const Normalizer> normalizer,
                            std::string language) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vocabulary file " + path);
  return parse(in, std::move(normalizer), std::move(language));
}

Vocabulary Vocabulary::load_default() { return load(data_dir() + "/vocab_en.txt", english_normalizer(), "en"); }

std::optional<std::string> Vocabulary::lookup_common(std::string_view word) const {
  auto it = by_lemma_.find(normalizer_->lemmatize(word));
  if (it == by_lemma_.end()) return std::nullopt;
  return entries_[it->second];
}

std::optional<WordGroup> Vocabulary::group_of(std::string_view entry) const {
  auto it = by_entry_.find(std::string(entry));
  if (it == by_entry_.end()) return std::nullopt;
  return groups_[it->second];
}

std::string data_dir() {
  if (const char* env = std::getenv("TQ_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return TQ_DEFAULT_DATA_DIR;
}

// ---------------------------------------------------------------------------
// Literal recognition.

namespace {

std::optional<int> month_number(std::string_view lower) {
  static constexpr std::array<std::string_view, 12> kFull = {
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december"};
  for (size_t i = 0; i < kFull.size(); ++i) {
    if (lower == kFull[i]) return static_cast<int>(i + 1);
    if (lower.size() == 3 && kFull[i].substr(0, 3) == lower && lower != "may") return static_cast<int>(i + 1);
  }
  if (lower == "sept") return 9;
  return std::nullopt;
}

bool all_digits(std::string_view s, size_t min_len, size_t max_len) {
  if (s.size() < min_len || s.size() > max_len) return false;
  for (char c : s) {
    if (!is_digit(c)) return false;
  }
  return true;
}

SymbolInstance make_number(double x) {
  SymbolInstance s;
  s.kind = SymbolKind::kN;
  s.value = x;
  return s;
}

SymbolInstance make_date(const Date& d) {
  SymbolInstance s;
  s.kind = SymbolKind::kD;
  s.value = d;
  return s;
}

// DD/MM/YYYY.
std::optional<Date> parse_slash_date(std::string_view s) {
  if (s.size() < 8 || s.size() > 10) return std::nullopt;
  const size_t a = s.find('/');
  const size_t b = s.rfind('/');
  if (a == std::string_view::npos || a == b) return std::nullopt;
  std::string_view dd = s.substr(0, a), mm = s.substr(a + 1, b - a - 1), yyyy = s.substr(b + 1);
  if (!all_digits(dd, 1, 2) || !all_digits(mm, 1, 2) || !all_digits(yyyy, 4, 4)) return std::nullopt;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s-%02d-%02d", std::string(yyyy).c_str(), std::stoi(std::string(mm)),
                std::stoi(std::string(dd)));
  return Date::parse(buf);
}

}  // namespace

std::vector<LiteralMatch> recognize_literals(const std::vector<WordPiece>& pieces) {
  std::vector<LiteralMatch> out;
  for (size_t i = 0; i < pieces.size(); ++i) {
    const WordPiece& p = pieces[i];
    // "Month DD, YYYY"
    if (auto month = month_number(p.lower); month && i + 2 < pieces.size() &&
                                           all_digits(pieces[i + 1].lower, 1, 2) &&
                                           all_digits(pieces[i + 2].lower, 4, 4)) {
      Date d{std::stoi(pieces[i + 2].lower), *month, std::stoi(pieces[i + 1].lower)};
      if (auto valid = Date::parse(d.iso())) {
        out.push_back({{p.span.begin, pieces[i + 2].span.end}, i, i + 3, make_date(*valid)});
        i += 2;
        continue;
      }
    }
    if (p.lower.size() == 10 && p.lower[4] == '-' && p.lower[7] == '-') {
      if (auto d = Date::parse(p.lower)) {
        out.push_back({p.span, i, i + 1, make_date(*d)});
        continue;
      }
    }
    if (p.lower.find('/') != std::string::npos) {
      if (auto d = parse_slash_date(p.lower)) out.push_back({p.span, i, i + 1, make_date(*d)});
      continue;
    }
    if (auto n = parse_number(p.lower); n && is_digit(p.lower[0])) {
      out.push_back({p.span, i, i + 1, make_number(*n)});
      if (all_digits(p.lower, 4, 4) && *n >= 1900 && *n <= 2100) {
        out.push_back({p.span, i, i + 1, make_date(Date{static_cast<int>(*n), 0, 0})});
      }
    }
  }
  return out;
}

std::vector<LiteralMatch> recognize_literals(std::string_view question, std::string_view language) {
  if (language != "en") return {};
  return recognize_literals(english_normalizer()->tokenize(question));
}

}  // namespace tq
