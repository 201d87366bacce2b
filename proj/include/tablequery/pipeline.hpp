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

#ifndef TABLEQUERY_PIPELINE_HPP_
#define TABLEQUERY_PIPELINE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tablequery/abstraction.hpp"
#include "tablequery/backend.hpp"
#include "tablequery/chart.hpp"
#include "tablequery/sql.hpp"
#include "tablequery/vocabulary.hpp"

namespace tq {

// A table with its abstraction index; immutable once built and shared
// between concurrent requests.
struct TableContext {
  std::string id;
  std::shared_ptr<const Table> table;
  std::shared_ptr<const TableIndex> index;
  SynonymDict synonyms;
};

std::shared_ptr<const TableContext> make_context(std::string id, std::shared_ptr<const Table> table,
                                                 const Vocabulary& vocab, SynonymDict synonyms = {});

struct PredictOptions {
  ParseLimits limits;
  // Add each utterance's annotation score to its best tree score when
  // choosing between utterances.
  bool weigh_annotation = false;
};

struct Prediction {
  enum class Failure { kNone, kNothingToParse, kNoParse, kInterpretation };
  std::vector<AbstractedUtterance> utterances;
  std::vector<std::optional<double>> utterance_scores;  // best tree score per utterance
  int chosen = -1;
  std::optional<Derivation> derivation;
  double score = 0;
  std::optional<SqlQuery> sql;
  Failure failure = Failure::kNone;
  std::string error;

  bool ok() const { return failure == Failure::kNone; }
};

std::string_view failure_name(Prediction::Failure f);

// Abstraction, best parse per utterance, the top-scoring utterance's tree
// (earlier utterance on ties), interpretation.
Prediction predict(std::string_view question, const TableContext& ctx, const Vocabulary& vocab, const Scorer& scorer,
                   const PredictOptions& options = {});

}  // namespace tq

#endif  // TABLEQUERY_PIPELINE_HPP_
