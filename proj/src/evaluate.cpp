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

#include "tablequery/harness.hpp"

#include <algorithm>
#include <set>

#include "parallel.hpp"

namespace tq {

namespace {

std::set<std::string> gold_columns(const SqlQuery& q) {
  std::set<std::string> out;
  auto add = [&](const std::string& c) {
    if (!c.empty()) out.insert(to_lower(c));
  };
  for (const auto& s : q.select) add(s.column);
  for (const auto& d : q.where) {
    for (const auto& c : d) add(c.column);
  }
  for (const auto& g : q.group_by) add(g);
  for (const auto& h : q.having) add(h.column);
  if (q.superlative) add(q.superlative->column);
  return out;
}

// Whether some utterance links every column the gold query mentions, through
// a column, value or literal symbol.
bool covers_gold(const std::vector<AbstractedUtterance>& utterances, const SqlQuery& gold, const Table& t) {
  const std::set<std::string> need = gold_columns(gold);
  for (const auto& u : utterances) {
    ColumnSet linked;
    for (const Token& tok : u.tokens) {
      if (tok.is_symbol() && tok.symbol->kind != SymbolKind::kT) linked = linked | tok.symbol->cols;
    }
    bool all = true;
    for (const std::string& name : need) {
      const auto c = t.column_index(name);
      all = all && c && linked.contains(*c);
    }
    if (all) return true;
  }
  return false;
}

std::set<std::string> select_columns(const SqlQuery& q) {
  std::set<std::string> out;
  for (const auto& s : q.select) out.insert(to_lower(s.column));
  return out;
}

std::multiset<int> select_aggregators(const SqlQuery& q) {
  std::multiset<int> out;
  for (const auto& s : q.select) out.insert(s.agg ? static_cast<int>(*s.agg) : -1);
  return out;
}

CanonicalSql where_only(const SqlQuery& q) {
  SqlQuery w;
  w.where = q.where;
  return canonicalize(w);
}

bool same_result(const SqlQuery& a, const SqlQuery& b, const Table& t) {
  try {
    return results_equal(execute(a, t), execute(b, t));
  } catch (const std::exception&) {
    return false;
  }
}

struct Outcome {
  EvalRecord record;
  bool column = false, aggregator = false, where = false;
  double trees = 0;
  size_t utterances = 0;
};

Outcome evaluate_one(const CorpusExample& e, const TableContext& ctx, const Scorer& scorer, const Vocabulary& vocab,
                     const EvalOptions& options) {
  const Table& t = *ctx.table;
  const Prediction p = predict(e.question, ctx, vocab, scorer, options.predict);
  Outcome o;
  EvalRecord& rec = o.record;
  rec.question = e.question;
  rec.table = e.table;
  rec.gold_sql = render_sql(e.gold, e.table);
  if (options.count_trees) {
    for (const auto& u : p.utterances) {
      ++o.utterances;
      try {
        const Chart chart(u, options.predict.limits);
        o.trees += static_cast<double>(std::min<uint64_t>(chart.tree_count(), options.predict.limits.max_trees));
      } catch (const ParseError&) {
      }
    }
  }
  if (p.ok()) {
    const SqlQuery& q = *p.sql;
    rec.predicted_sql = render_sql(q, e.table);
    rec.qm = canonicalize(q) == canonicalize(e.gold);
    rec.ex = rec.qm || same_result(q, e.gold, t);
    o.column = select_columns(q) == select_columns(e.gold);
    o.aggregator = select_aggregators(q) == select_aggregators(e.gold);
    o.where = where_only(q) == where_only(e.gold);
  }
  if (!rec.qm) {
    if (p.failure == Prediction::Failure::kNothingToParse || !covers_gold(p.utterances, e.gold, t)) {
      rec.bucket = "abstraction-miss";
    } else if (!p.ok()) {
      rec.bucket = "no-parse";
    } else if (!rec.ex) {
      rec.bucket = "wrong-tree";
    } else {
      rec.bucket = "execution-divergence";
    }
  }
  return o;
}

}  // namespace

EvalReport evaluate(const Corpus& corpus, const Scorer& scorer, const Vocabulary& vocab, const EvalOptions& options) {
  std::vector<Outcome> outcomes(corpus.examples.size());
  parallel_for(outcomes.size(), options.threads, [&](size_t i) {
    const CorpusExample& e = corpus.examples[i];
    outcomes[i] = evaluate_one(e, corpus.table(e.table), scorer, vocab, options);
  });
  EvalReport r;
  r.examples = corpus.examples.size();
  size_t qm = 0, ex = 0, col = 0, agg = 0, where = 0, utterances = 0;
  double trees = 0;
  for (Outcome& o : outcomes) {
    qm += o.record.qm;
    ex += o.record.ex;
    col += o.column;
    agg += o.aggregator;
    where += o.where;
    trees += o.trees;
    utterances += o.utterances;
    if (!o.record.bucket.empty()) ++r.buckets[o.record.bucket];
    r.records.push_back(std::move(o.record));
  }
  const double n = static_cast<double>(std::max<size_t>(1, r.examples));
  r.acc_qm = static_cast<double>(qm) / n;
  r.acc_ex = static_cast<double>(ex) / n;
  r.acc_select_column = static_cast<double>(col) / n;
  r.acc_select_aggregator = static_cast<double>(agg) / n;
  r.acc_where = static_cast<double>(where) / n;
  r.avg_valid_trees = utterances == 0 ? 0.0 : trees / static_cast<double>(utterances);
  return r;
}

nlohmann::json EvalReport::to_json(bool with_records) const {
  nlohmann::json j = {
      {"examples", examples},
      {"acc_qm", acc_qm},
      {"acc_ex", acc_ex},
      {"acc_select_column", acc_select_column},
      {"acc_select_aggregator", acc_select_aggregator},
      {"acc_where", acc_where},
      {"avg_valid_trees", avg_valid_trees},
      {"buckets", buckets},
  };
  if (with_records) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) {
      recs.push_back({{"question", r.question},
                      {"table", r.table},
                      {"gold", r.gold_sql},
                      {"predicted", r.predicted_sql.empty() ? nlohmann::json() : nlohmann::json(r.predicted_sql)},
                      {"qm", r.qm},
                      {"ex", r.ex},
                      {"bucket", r.bucket.empty() ? nlohmann::json() : nlohmann::json(r.bucket)}});
    }
    j["records"] = std::move(recs);
  }
  return j;
}

std::vector<LabeledExample> label_corpus(const Corpus& corpus, const Vocabulary& vocab, const LabelOptions& options,
                                         unsigned threads) {
  std::vector<LabeledExample> out(corpus.examples.size());
  parallel_for(out.size(), threads, [&](size_t i) {
    const CorpusExample& e = corpus.examples[i];
    try {
      out[i] = label_candidates(e.question, e.gold, corpus.table(e.table), vocab, options);
    } catch (const ValidationError&) {
      out[i].status = LabelStatus::kUnparseable;
    }
  });
  return out;
}

std::vector<DevExample> dev_examples(const Corpus& corpus) {
  std::vector<DevExample> out;
  out.reserve(corpus.examples.size());
  for (const CorpusExample& e : corpus.examples) out.push_back({e.question, corpus.tables.at(e.table), e.gold});
  return out;
}

}  // namespace tq
