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

#include "tablequery/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tq {

std::string_view label_status_name(LabelStatus s) {
  switch (s) {
    case LabelStatus::kOk: return "ok";
    case LabelStatus::kUnreachable: return "unreachable";
    case LabelStatus::kUnparseable: return "unparseable";
    case LabelStatus::kNoNegatives: return "no-negatives";
  }
  return "?";
}

LabeledExample label_candidates(std::string_view question, const SqlQuery& gold, const TableContext& ctx,
                                const Vocabulary& vocab, const LabelOptions& options) {
  validate(gold, *ctx.table);
  const CanonicalSql target = canonicalize(gold);
  LabeledExample ex;
  ex.utterances = abstract_question(question, *ctx.index, vocab, ctx.synonyms);
  for (size_t ui = 0; ui < ex.utterances.size(); ++ui) {
    const AbstractedUtterance& u = ex.utterances[ui];
    ParseAllResult all;
    try {
      all = parse_all(u, options.limits);
    } catch (const ParseError&) {
      continue;
    }
    ex.trees += all.trees.size();
    ex.truncated = ex.truncated || all.truncated;
    for (const Derivation& d : all.trees) {
      bool consistent;
      try {
        consistent = canonicalize(interpret(d, *ctx.table)) == target;
      } catch (const InterpretationError&) {
        ++ex.interpretation_errors;
        continue;
      }
      Candidate c;
      c.utterance = static_cast<int>(ui);
      c.nodes = collect_nodes(d, u, options.mode, options.granularity, ex.batch).nodes;
      c.consistent = consistent;
      (consistent ? ex.positives : ex.negatives)++;
      ex.candidates.push_back(std::move(c));
    }
  }
  if (ex.candidates.empty()) {
    ex.status = LabelStatus::kUnparseable;
  } else if (ex.positives == 0) {
    ex.status = LabelStatus::kUnreachable;
  } else if (ex.negatives == 0) {
    ex.status = LabelStatus::kNoNegatives;
  } else {
    ex.status = LabelStatus::kOk;
  }
  return ex;
}

LossResult pairwise_loss(const std::vector<double>& totals, const std::vector<bool>& consistent,
                         const LossConfig& config) {
  LossResult out;
  out.dtotal.assign(totals.size(), 0.0);
  std::vector<int> pos, neg;
  for (size_t i = 0; i < totals.size(); ++i) (consistent[i] ? pos : neg).push_back(static_cast<int>(i));
  if (pos.empty() || neg.empty()) return out;
  if (config.max_negatives > 0 && neg.size() > config.max_negatives) {
    std::stable_sort(neg.begin(), neg.end(), [&](int a, int b) { return totals[a] > totals[b]; });
    neg.resize(config.max_negatives);
  }
  out.retained = pos;
  out.retained.insert(out.retained.end(), neg.begin(), neg.end());
  std::sort(out.retained.begin(), out.retained.end());

  std::vector<double> z;
  z.reserve(out.retained.size());
  for (int i : out.retained) z.push_back(totals[i]);
  const std::vector<double> p = tree_probabilities(z);

  // d loss / d p over the retained candidates.
  std::vector<double> dp(p.size(), 0.0);
  const double m = static_cast<double>(pos.size());
  const double k = static_cast<double>(neg.size());
  if (!config.per_pair_hinge) {
    double sum_pos = 0, sum_neg = 0;
    for (size_t r = 0; r < p.size(); ++r) (consistent[out.retained[r]] ? sum_pos : sum_neg) += p[r];
    // sum_j sum_k (p_j - p_k) = K * sum p+ - M * sum p-
    const double inner = k * sum_pos - m * sum_neg;
    const double hinge = config.margin - inner;
    if (hinge > 0) {
      out.loss = hinge;
      for (size_t r = 0; r < p.size(); ++r) dp[r] = consistent[out.retained[r]] ? -k : m;
    }
  } else {
    std::vector<size_t> rp, rn;
    for (size_t r = 0; r < p.size(); ++r) (consistent[out.retained[r]] ? rp : rn).push_back(r);
    for (size_t a : rp) {
      for (size_t b : rn) {
        const double hinge = config.margin - (p[a] - p[b]);
        if (hinge > 0) {
          out.loss += hinge;
          dp[a] -= 1.0;
          dp[b] += 1.0;
        }
      }
    }
  }
  if (out.loss > 0) {
    double mean = 0;
    for (size_t r = 0; r < p.size(); ++r) mean += p[r] * dp[r];
    for (size_t r = 0; r < p.size(); ++r) out.dtotal[out.retained[r]] = p[r] * (dp[r] - mean);
  }
  return out;
}

namespace {

std::vector<double> totals_from(const LabeledExample& ex, const std::vector<double>& node_scores) {
  std::vector<double> totals(ex.candidates.size(), 0.0);
  for (size_t c = 0; c < ex.candidates.size(); ++c) {
    for (int n : ex.candidates[c].nodes) totals[c] += node_scores[n];
  }
  return totals;
}

std::vector<bool> labels_of(const LabeledExample& ex) {
  std::vector<bool> out(ex.candidates.size());
  for (size_t c = 0; c < ex.candidates.size(); ++c) out[c] = ex.candidates[c].consistent;
  return out;
}

}  // namespace

std::vector<double> candidate_totals(const Model& model, const LabeledExample& ex) {
  return totals_from(ex, model.score_batch(ex.batch));
}

double example_loss(const Model& model, const LabeledExample& ex, const LossConfig& config, std::vector<double>* grad) {
  if (ex.status != LabelStatus::kOk) return 0.0;
  const Model::States states = model.encode_batch(ex.batch);
  const std::vector<double> totals = totals_from(ex, model.score_batch(ex.batch, states));
  const LossResult r = pairwise_loss(totals, labels_of(ex), config);
  if (grad != nullptr && r.loss > 0) {
    std::vector<double> dnode(ex.batch.nodes.size(), 0.0);
    for (int c : r.retained) {
      for (int n : ex.candidates[c].nodes) dnode[n] += r.dtotal[c];
    }
    model.gradient_batch(ex.batch, states, dnode, *grad);
  }
  return r.loss;
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (m_.size() < params.size()) {
    m_.resize(params.size(), 0.0);
    v_.resize(params.size(), 0.0);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const size_t n = std::min(params.size(), grad.size());
  for (size_t i = 0; i < n; ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

double dev_accuracy(const Model& model, const std::vector<DevExample>& dev, const Vocabulary& vocab,
                    const ParseLimits& limits) {
  if (dev.empty()) return -1;
  PredictOptions opts;
  opts.limits = limits;
  int hits = 0;
  for (const DevExample& d : dev) {
    const Prediction p = predict(d.question, *d.table, vocab, model, opts);
    if (p.ok() && canonicalize(*p.sql) == canonicalize(d.gold)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dev.size());
}

TrainReport train(Model& model, const std::vector<LabeledExample>& examples, const std::vector<DevExample>& dev,
                  const Vocabulary& vocab, const TrainerConfig& config,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  if (!(config.loss.margin > 0)) throw std::invalid_argument("margin must be positive");
  if (config.learning_rate < 0) throw std::invalid_argument("learning rate must be non-negative");
  TrainReport report;
  report.examples = static_cast<int>(examples.size());
  std::vector<int> trainable;
  uint64_t trees = 0;
  size_t utterances = 0;
  for (size_t i = 0; i < examples.size(); ++i) {
    const LabeledExample& ex = examples[i];
    trees += ex.trees;
    utterances += ex.utterances.size();
    switch (ex.status) {
      case LabelStatus::kOk: trainable.push_back(static_cast<int>(i)); break;
      case LabelStatus::kUnreachable: ++report.unreachable; break;
      case LabelStatus::kUnparseable: ++report.unparseable; break;
      case LabelStatus::kNoNegatives: ++report.no_negatives; break;
    }
  }
  report.trainable = static_cast<int>(trainable.size());
  report.avg_candidates = utterances == 0 ? 0.0 : static_cast<double>(trees) / static_cast<double>(utterances);
  if (trainable.empty()) {
    throw TrainingError("no trainable example: " + std::to_string(report.unreachable) + " unreachable, " +
                        std::to_string(report.unparseable) + " unparseable, " + std::to_string(report.no_negatives) +
                        " without negatives");
  }
  for (int i : trainable) model.register_surfaces(examples[i].batch);

  Adam adam(config.learning_rate);
  std::mt19937_64 rng(config.seed);
  std::vector<double> best_params = model.params();
  const size_t batch = static_cast<size_t>(std::max(1, config.batch_size));
  std::vector<double> grad;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<int> order = trainable;
    std::shuffle(order.begin(), order.end(), rng);
    double total_loss = 0;
    for (size_t start = 0; start < order.size(); start += batch) {
      const size_t end = std::min(order.size(), start + batch);
      grad.assign(model.params().size(), 0.0);
      for (size_t i = start; i < end; ++i) total_loss += example_loss(model, examples[order[i]], config.loss, &grad);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (double& g : grad) g *= scale;
      adam.step(model.params(), grad);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = total_loss / static_cast<double>(order.size());
    stats.dev_acc_qm = dev_accuracy(model, dev, vocab);
    report.epochs.push_back(stats);
    if (dev.empty() || stats.dev_acc_qm > report.best_dev_acc_qm) {
      report.best_dev_acc_qm = stats.dev_acc_qm;
      report.best_epoch = epoch;
      best_params = model.params();
    }
    if (on_epoch) on_epoch(stats);
  }
  if (config.epochs > 0) model.params() = best_params;
  return report;
}

}  // namespace tq
