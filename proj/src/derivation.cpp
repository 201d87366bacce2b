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

#include "tablequery/derivation.hpp"

#include <sstream>

#include "tablequery/utterance.hpp"

namespace tq {

Token Token::common(std::string entry, CharSpan source) {
  Token t;
  t.kind = Kind::kCommon;
  t.word = std::move(entry);
  t.source = source;
  return t;
}

Token Token::unknown(std::string text, CharSpan source) {
  Token t;
  t.kind = Kind::kUnknown;
  t.word = std::move(text);
  t.source = source;
  return t;
}

Token Token::of_symbol(SymbolInstance s, std::string text, CharSpan source) {
  Token t;
  t.kind = Kind::kSymbol;
  t.word = std::move(text);
  t.symbol = std::move(s);
  t.source = source;
  return t;
}

bool Token::operator==(const Token& other) const {
  if (kind != other.kind || !(source == other.source)) return false;
  if (kind == Kind::kSymbol) return *symbol == *other.symbol;
  return word == other.word;
}

std::vector<int> AbstractedUtterance::symbol_positions() const {
  std::vector<int> out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is_symbol()) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::string AbstractedUtterance::render() const {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out += ' ';
    switch (t.kind) {
      case Token::Kind::kCommon: out += t.word; break;
      case Token::Kind::kUnknown: out += "UNK"; break;
      case Token::Kind::kSymbol: out += kind_letter(t.symbol->kind); break;
    }
  }
  return out;
}

bool is_raising(RuleId rule) {
  return rule == RuleId::kAggregateNum || rule == RuleId::kAggregateCount || rule == RuleId::kRaiseFilter;
}

bool is_composition(RuleId rule) { return rule != RuleId::kLeaf && !is_raising(rule); }

std::string_view rule_name(RuleId rule) {
  switch (rule) {
    case RuleId::kLeaf: return "leaf";
    case RuleId::kProject: return "C|A|G|S+T->T";
    case RuleId::kFilter: return "F+T->T";
    case RuleId::kGroup: return "A|G+C->G";
    case RuleId::kEqual: return "C+V|D->F";
    case RuleId::kCompare: return "C+N->F";
    case RuleId::kConjunction: return "F+F->F";
    case RuleId::kSuperlative: return "A|C1+C2->S";
    case RuleId::kCombineColumns: return "C+C->C";
    case RuleId::kCombineAggregates: return "A+A->A";
    case RuleId::kModify: return "C|A|G|S+F->C|A|G|S";
    case RuleId::kAggregateNum: return "C->A(num)";
    case RuleId::kAggregateCount: return "C->A(count)";
    case RuleId::kRaiseFilter: return "V|D->F";
  }
  return "?";
}

std::string_view predicate_name(Predicate predicate) {
  switch (predicate) {
    case Predicate::kNone: return "";
    case Predicate::kProject: return "project";
    case Predicate::kFilter: return "filter";
    case Predicate::kGroup: return "group";
    case Predicate::kEqual: return "equal";
    case Predicate::kMore: return "more";
    case Predicate::kLess: return "less";
    case Predicate::kAtLeast: return ">=";
    case Predicate::kAtMost: return "<=";
    case Predicate::kAnd: return "and";
    case Predicate::kOr: return "or";
    case Predicate::kArgmax: return "argmax";
    case Predicate::kArgmin: return "argmin";
    case Predicate::kCombine: return "combine";
    case Predicate::kModify: return "modify";
    case Predicate::kMin: return "min";
    case Predicate::kMax: return "max";
    case Predicate::kSum: return "sum";
    case Predicate::kAvg: return "avg";
    case Predicate::kCount: return "count";
  }
  return "?";
}

const DerivationNode& DerivationNode::first_operand() const {
  return swapped && children.size() == 2 ? *children[1] : *children[0];
}

const DerivationNode& DerivationNode::second_operand() const {
  return swapped ? *children[0] : *children[1];
}

NodePtr make_leaf(const SymbolInstance& symbol, int token) {
  auto n = std::make_shared<DerivationNode>();
  n->rule = RuleId::kLeaf;
  n->span = {token, token + 1};
  n->result = symbol;
  n->token = token;
  return n;
}

NodePtr make_node(RuleId rule, Predicate predicate, Span span, SymbolInstance result,
                  std::vector<NodePtr> children, bool swapped) {
  auto n = std::make_shared<DerivationNode>();
  n->rule = rule;
  n->predicate = predicate;
  n->span = span;
  n->result = std::move(result);
  n->children = std::move(children);
  n->swapped = swapped;
  return n;
}

std::string serialize_node(const DerivationNode& node) {
  std::string out = "(";
  if (node.is_leaf()) {
    out += "leaf ";
    out += node.result.signature();
    out += " @" + std::to_string(node.token) + ")";
    return out;
  }
  out += rule_name(node.rule);
  out += ":";
  out += predicate_name(node.predicate);
  out += " [" + std::to_string(node.span.start) + "," + std::to_string(node.span.end) + ") ";
  out += node.result.signature();
  if (node.swapped) out += " ~";
  for (const NodePtr& c : node.children) {
    out += " ";
    out += serialize_node(*c);
  }
  out += ")";
  return out;
}

std::string Derivation::serialize() const { return root ? serialize_node(*root) : "()"; }

namespace {

void pretty_rec(const DerivationNode& n, int depth, std::ostringstream& os) {
  os << std::string(depth * 2, ' ');
  if (n.is_leaf()) {
    os << kind_letter(n.result.kind) << " " << n.result.signature() << " @" << n.token << "\n";
    return;
  }
  os << kind_letter(n.result.kind) << " <- " << rule_name(n.rule) << " [" << predicate_name(n.predicate)
     << "] span=[" << n.span.start << "," << n.span.end << ") " << n.result.signature() << "\n";
  for (const NodePtr& c : n.children) pretty_rec(*c, depth + 1, os);
}

int count_rec(const DerivationNode& n, bool internal_only) {
  int total = (internal_only && n.is_leaf()) ? 0 : 1;
  for (const NodePtr& c : n.children) total += count_rec(*c, internal_only);
  return total;
}

void visit_rec(const DerivationNode& n, const std::function<void(const DerivationNode&)>& fn) {
  fn(n);
  for (const NodePtr& c : n.children) visit_rec(*c, fn);
}

}  // namespace

std::string Derivation::pretty() const {
  std::ostringstream os;
  if (root) pretty_rec(*root, 0, os);
  return os.str();
}

int Derivation::node_count() const { return root ? count_rec(*root, false) : 0; }

int Derivation::internal_node_count() const { return root ? count_rec(*root, true) : 0; }

void Derivation::visit(const std::function<void(const DerivationNode&)>& fn) const {
  if (root) visit_rec(*root, fn);
}

}  // namespace tq
