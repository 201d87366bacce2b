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

#ifndef TABLEQUERY_RULES_HPP_
#define TABLEQUERY_RULES_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tablequery/derivation.hpp"
#include "tablequery/symbol.hpp"

namespace tq {

// Number of distinct (rule, predicate) pairs.
inline constexpr int kNumRulePredicates = 21;

// Dense id of a (rule, predicate) pair in [0, kNumRulePredicates); -1 when
// the pair is not licensed.
int rule_predicate_index(RuleId rule, Predicate predicate);
// Dense id of the rule alone in [0, kNumRules).
int rule_index(RuleId rule);
std::string rule_predicate_name(int index);

// Predicates a rule may produce, in id order.
std::vector<Predicate> rule_predicates(RuleId rule);
const std::vector<RuleId>& composition_rules();
const std::vector<RuleId>& raising_rules();

struct RuleApplication {
  RuleId rule = RuleId::kLeaf;
  Predicate predicate = Predicate::kNone;
  SymbolInstance output;
  // Composition only: the right input is the rule's first operand.
  bool swapped = false;
};

// Precondition and schema of one rule with operands in rule order; nullopt
// when the precondition fails. `second` is null for raising rules.
std::optional<SymbolInstance> apply_rule(RuleId rule, const SymbolInstance& first, const SymbolInstance* second);

// Raising rules applicable to one symbol.
std::vector<RuleApplication> applicable(const SymbolInstance& only);
// Composition rules applicable to two adjacent symbols, `left` first. Both
// operand orders are tried; for symmetric rules the swapped duplicate is
// dropped.
std::vector<RuleApplication> applicable(const SymbolInstance& left, const SymbolInstance& right);
std::vector<RuleApplication> applicable(std::span<const SymbolInstance> inputs);

// Modification precondition: head and filter columns are disjoint.
bool check_modification(const SymbolInstance& head, const SymbolInstance& f);

struct RaisingEdge {
  SymbolKind from;
  SymbolKind to;
  RuleId rule;
};

// Kind graph of the shipped raising rules.
std::vector<RaisingEdge> raising_edges();
// Strongly connected kind sets that form cycles (including self loops).
std::vector<std::vector<SymbolKind>> detect_loops(const std::vector<RaisingEdge>& edges);

// The rule table as text: rule, precondition, schema.
std::string dump_rules();

}  // namespace tq

#endif  // TABLEQUERY_RULES_HPP_
