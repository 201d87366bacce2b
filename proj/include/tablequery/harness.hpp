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

#ifndef TABLEQUERY_HARNESS_HPP_
#define TABLEQUERY_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "tablequery/pipeline.hpp"
#include "tablequery/training.hpp"

namespace tq {

struct CorpusExample {
  std::string question;
  std::string table;  // id in Corpus::tables
  SqlQuery gold;
};

struct Corpus {
  std::map<std::string, std::shared_ptr<const TableContext>> tables;
  std::vector<CorpusExample> examples;
  int skipped = 0;                    // malformed or invalid records
  std::vector<std::string> warnings;  // first few skip reasons

  const TableContext& table(const std::string& id) const;
  // Examples at the given indices, sharing the table store.
  Corpus subset(const std::vector<size_t>& indices) const;
};

// Column types from cell text: num when every non-empty cell parses as a
// number, date (when allowed) when every non-empty cell parses as a date,
// str otherwise.
Table infer_table(std::string name, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& cells, bool allow_dates = true);

// CSV whose second row may be a type row (str/num/date); without one the
// types are inferred.
Table read_table_csv(std::istream& in, std::string name);

// Every *.csv in dir, keyed by file stem.
std::map<std::string, std::shared_ptr<const TableContext>> load_tables_dir(const std::string& dir,
                                                                           const Vocabulary& vocab);

// Line-JSON {"question", "table", "sql"} with sql in the rendered dialect.
// Tables resolve against tables_dir. Bad lines are skipped and counted.
Corpus load_corpus(const std::string& path, const std::string& tables_dir, const Vocabulary& vocab);
Corpus read_corpus(std::istream& in, std::map<std::string, std::shared_ptr<const TableContext>> tables);
void write_corpus(const Corpus& corpus, std::ostream& out);

// WikiSQL release layout: <dir>/<split>.jsonl and <dir>/<split>.tables.jsonl.
// Aggregator and operator codes come from the code table file. Records that
// fail conversion (unknown column, unsupported operator, invalid query) are
// skipped and counted. limit = 0 reads everything.
struct WikiSqlCodes {
  std::vector<std::string> agg_ops;
  std::vector<std::string> cond_ops;
  static WikiSqlCodes load(const std::string& path);
  static WikiSqlCodes load_default();
};
Corpus load_wikisql(const std::string& dir, const std::string& split, const Vocabulary& vocab, size_t limit = 0);
SqlQuery wikisql_query(const nlohmann::json& sql, const Table& t, const WikiSqlCodes& codes);

// Writes a generated slice in the WikiSQL layout: many small tables from a
// pool of domain schemas, single-column select with an optional aggregator
// and conjunctive conditions.
struct WikiSqlSliceStats {
  size_t tables = 0;
  std::map<std::string, size_t> questions;  // per split
};
WikiSqlSliceStats write_wikisql_slice(const std::string& dir, uint64_t seed,
                                      const std::map<std::string, size_t>& split_sizes);

// Template questions of the six basic kinds (statistic, group by,
// superlative, filter, comparison, pinpoint) and combinations, with
// paraphrases and occasional one-character typos in linked words. When
// verify is set every example is checked to be reachable (some derivation
// interprets to its gold query) and std::logic_error is thrown otherwise.
struct SyntheticOptions {
  uint64_t seed = 1;
  double typo_rate = 0.1;
  bool verify = true;
};
Corpus generate_synthetic(const std::map<std::string, std::shared_ptr<const TableContext>>& tables, size_t n,
                          const Vocabulary& vocab, const SyntheticOptions& options = {});

// Built-in toy tables under <data>/tables.
std::map<std::string, std::shared_ptr<const TableContext>> builtin_tables(const Vocabulary& vocab);

struct EvalOptions {
  PredictOptions predict;
  bool count_trees = true;  // compute the average valid trees statistic
  unsigned threads = 0;     // 0: one worker per core
};

struct EvalRecord {
  std::string question;
  std::string table;
  std::string gold_sql;
  std::string predicted_sql;  // empty when no query was produced
  bool qm = false;
  bool ex = false;
  std::string bucket;  // empty when correct
};

struct EvalReport {
  size_t examples = 0;
  double acc_qm = 0;
  double acc_ex = 0;
  double acc_select_column = 0;
  double acc_select_aggregator = 0;
  double acc_where = 0;
  double avg_valid_trees = 0;  // per abstracted utterance, capped by the parse limits
  std::map<std::string, size_t> buckets;
  std::vector<EvalRecord> records;

  nlohmann::json to_json(bool with_records = false) const;
};

EvalReport evaluate(const Corpus& corpus, const Scorer& scorer, const Vocabulary& vocab,
                    const EvalOptions& options = {});

// Labels every example (see label_candidates); invalid gold queries are
// reported as unparseable.
std::vector<LabeledExample> label_corpus(const Corpus& corpus, const Vocabulary& vocab, const LabelOptions& options,
                                         unsigned threads = 0);

std::vector<DevExample> dev_examples(const Corpus& corpus);

// A fresh model of the given kind; neural weights are drawn from seed.
std::unique_ptr<Model> make_model(ModelKind kind, const ModelConfig& config, const Vocabulary& vocab,
                                  uint64_t seed = 1, const NeuralDims& dims = {});

// k-fold cross-validation: examples are shuffled with seed and dealt into
// folds; each fold is evaluated with a model trained on the others. No dev
// split is carved out, so each fold keeps its last epoch.
struct CrossValidationOptions {
  int folds = 5;
  uint64_t seed = 1;
  ModelKind kind = ModelKind::kSparse;
  ModelConfig model;
  NeuralDims dims;
  TrainerConfig trainer;
  ParseLimits limits;
};

struct FoldResult {
  TrainReport train;
  EvalReport eval;
  double seconds = 0;
};

struct CrossValidationReport {
  std::vector<FoldResult> folds;
  double acc_qm = 0;  // pooled over all held-out examples
  double acc_ex = 0;
  double seconds = 0;

  nlohmann::json to_json() const;
};

CrossValidationReport cross_validate(const Corpus& corpus, const Vocabulary& vocab,
                                     const CrossValidationOptions& options,
                                     const std::function<void(int, const FoldResult&)>& on_fold = {});

}  // namespace tq

#endif  // TABLEQUERY_HARNESS_HPP_
