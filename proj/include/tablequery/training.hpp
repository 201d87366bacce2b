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

#ifndef TABLEQUERY_TRAINING_HPP_
#define TABLEQUERY_TRAINING_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tablequery/pipeline.hpp"
#include "tablequery/scoring.hpp"

namespace tq {

enum class LabelStatus {
  kOk,
  kUnreachable,  // no candidate interprets to the gold query
  kUnparseable,  // no candidate at all
  kNoNegatives,  // every candidate is consistent; nothing to learn from
};

std::string_view label_status_name(LabelStatus s);

struct Candidate {
  int utterance = 0;
  std::vector<int> nodes;  // into LabeledExample::batch
  bool consistent = false;
};

// Every enumerated derivation of every abstraction of one question, labeled
// by canonical comparison of its interpretation with the gold query.
struct LabeledExample {
  LabelStatus status = LabelStatus::kUnparseable;
  std::vector<AbstractedUtterance> utterances;
  NodeBatch batch;
  std::vector<Candidate> candidates;
  int positives = 0;
  int negatives = 0;
  uint64_t trees = 0;  // enumerated derivations
  bool truncated = false;
  int interpretation_errors = 0;
};

struct LabelOptions {
  ParseLimits limits;
  SurfaceMode mode = SurfaceMode::kBidirectional;
  RuleGranularity granularity = RuleGranularity::kPredicate;
};

// Throws ValidationError when gold does not validate against the table.
LabeledExample label_candidates(std::string_view question, const SqlQuery& gold, const TableContext& ctx,
                                const Vocabulary& vocab, const LabelOptions& options = {});

struct LossConfig {
  double margin = 0.5;
  // Sum of per-pair hinges instead of one hinge over the summed differences.
  bool per_pair_hinge = false;
  // Negatives kept per example, highest scoring first; 0 keeps all. With one
  // positive, a zero loss then means p+ >= (1 + margin) / (K + 1), which puts
  // the positive above every kept negative only for K <= 2.
  size_t max_negatives = 2;
};

struct LossResult {
  double loss = 0;
  // d loss / d total, per candidate (zero for candidates not retained).
  std::vector<double> dtotal;
  std::vector<int> retained;
};

// max(0, margin - sum_j sum_k (p(z_j+) - p(z_k-))) with p the softmax over the
// retained candidates' totals.
LossResult pairwise_loss(const std::vector<double>& totals, const std::vector<bool>& consistent,
                         const LossConfig& config);

// Loss of one labeled example under the model; adds its parameter gradient
// to grad when given. Examples with status other than kOk contribute zero.
double example_loss(const Model& model, const LabeledExample& ex, const LossConfig& config,
                    std::vector<double>* grad = nullptr);

std::vector<double> candidate_totals(const Model& model, const LabeledExample& ex);

class Adam {
 public:
  Adam(double lr = 0.001, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(std::vector<double>& params, const std::vector<double>& grad);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

struct TrainerConfig {
  LossConfig loss;
  double learning_rate = 0.001;
  int epochs = 15;
  int batch_size = 8;
  uint64_t seed = 1;
};

struct DevExample {
  std::string question;
  std::shared_ptr<const TableContext> table;
  SqlQuery gold;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0;     // mean over trainable examples
  double dev_acc_qm = -1;  // -1 without a dev set
};

struct TrainReport {
  int examples = 0;
  int trainable = 0;
  int unreachable = 0;
  int unparseable = 0;
  int no_negatives = 0;
  double avg_candidates = 0;  // enumerated trees per abstracted utterance
  std::vector<EpochStats> epochs;
  int best_epoch = 0;
  double best_dev_acc_qm = -1;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeded shuffled mini-batches, Adam on the mean batch gradient; keeps the
// parameters of the best dev epoch (the last epoch without a dev set).
// Throws TrainingError when no example is trainable.
TrainReport train(Model& model, const std::vector<LabeledExample>& examples, const std::vector<DevExample>& dev,
                  const Vocabulary& vocab, const TrainerConfig& config,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

// Fraction of dev questions whose predicted query canonically equals gold.
double dev_accuracy(const Model& model, const std::vector<DevExample>& dev, const Vocabulary& vocab,
                    const ParseLimits& limits = {});

}  // namespace tq

#endif  // TABLEQUERY_TRAINING_HPP_
