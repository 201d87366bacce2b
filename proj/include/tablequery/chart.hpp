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

#ifndef TABLEQUERY_CHART_HPP_
#define TABLEQUERY_CHART_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tablequery/derivation.hpp"
#include "tablequery/rules.hpp"
#include "tablequery/utterance.hpp"

namespace tq {

enum class SurfaceMode : uint8_t { kInside, kLeft, kRight, kBidirectional };

std::string_view surface_mode_name(SurfaceMode mode);
std::optional<SurfaceMode> parse_surface_mode(std::string_view text);

inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kEmptyToken = "<empty>";

// Token window s' around a span. Symbols render as their kind letter,
// unknown words as <unk>.
struct SurfaceStructure {
  SurfaceMode mode = SurfaceMode::kBidirectional;
  std::vector<int> positions;  // token indices, increasing
  std::vector<std::string> tokens;
};

std::string surface_token(const Token& t);
SurfaceStructure surface(const AbstractedUtterance& u, Span s, SurfaceMode mode);

// Node scores for one utterance. Implementations may cache per call, so an
// instance must not be shared between threads.
class NodeScorer {
 public:
  virtual ~NodeScorer() = default;
  virtual double score(RuleId rule, Predicate predicate, Span span) = 0;
};

// A scoring model; bind() is const and reentrant.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::unique_ptr<NodeScorer> bind(const AbstractedUtterance& u) const = 0;
};

// Every node scores zero.
class UniformScorer : public Scorer {
 public:
  std::unique_ptr<NodeScorer> bind(const AbstractedUtterance& u) const override;
};

struct ParseLimits {
  size_t max_trees = 5000;
  size_t max_items = 50000;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { kNothingToParse, kNoValidTree };
  ParseError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Root kinds that interpret to a query.
bool is_root_kind(SymbolKind kind);

// Extended CYK chart over the symbol tokens of one utterance. Non-symbol
// tokens between two items are absorbed by their composition.
class Chart {
 public:
  struct BackPointer {
    RuleId rule = RuleId::kLeaf;
    Predicate predicate = Predicate::kNone;
    int split = -1;  // last symbol index of the left child; -1 for leaf/raising
    int left = -1;   // item index in the left cell (or the same cell for raising)
    int right = -1;  // item index in the right cell
    bool swapped = false;
  };
  struct Item {
    SymbolInstance symbol;
    std::vector<BackPointer> backs;
    uint64_t count = 0;  // saturating number of trees
  };
  struct Cell {
    std::vector<Item> items;
    std::map<SymbolInstance, int> by_signature;
  };

  Chart(const AbstractedUtterance& u, ParseLimits limits = {});

  int num_symbols() const { return static_cast<int>(positions_.size()); }
  const Cell& cell(int i, int j) const { return cells_[i * num_symbols() + j]; }
  Span span_of(int i, int j) const { return {positions_[i], positions_[j] + 1}; }
  bool item_cap_hit() const { return item_cap_hit_; }
  size_t item_count() const { return item_count_; }

  // Root items (cell covering all symbols, interpretable kinds), in order.
  const std::vector<int>& roots() const { return roots_; }
  // Saturating number of complete derivations.
  uint64_t tree_count() const { return tree_count_; }
  // The k-th derivation in the deterministic order, k < tree_count().
  Derivation tree(uint64_t k) const;

  struct Best {
    Derivation derivation;
    double score = 0;
  };
  Best best(NodeScorer& scorer) const;

 private:
  Cell& cell_mut(int i, int j) { return cells_[i * num_symbols() + j]; }
  void add(int i, int j, const SymbolInstance& symbol, const BackPointer& bp);
  NodePtr build(int i, int j, int item, uint64_t k) const;

  const AbstractedUtterance* u_;
  ParseLimits limits_;
  std::vector<int> positions_;
  std::vector<Cell> cells_;
  std::vector<int> roots_;
  uint64_t tree_count_ = 0;
  size_t item_count_ = 0;
  bool item_cap_hit_ = false;
};

struct ParseAllResult {
  std::vector<Derivation> trees;
  uint64_t total = 0;  // before truncation (saturating)
  bool truncated = false;
};

ParseAllResult parse_all(const AbstractedUtterance& u, ParseLimits limits = {});

struct ParseBestResult {
  Derivation derivation;
  double score = 0;
};

ParseBestResult parse_best(const AbstractedUtterance& u, const Scorer& scorer, ParseLimits limits = {});

// Sum of node scores of a derivation (leaves score zero).
double derivation_score(const Derivation& d, NodeScorer& scorer);

}  // namespace tq

#endif  // TABLEQUERY_CHART_HPP_
