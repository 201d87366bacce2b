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

#ifndef TABLEQUERY_SCORING_HPP_
#define TABLEQUERY_SCORING_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tablequery/chart.hpp"
#include "tablequery/derivation.hpp"
#include "tablequery/vocabulary.hpp"

namespace tq {

// Which identity a node's rule feature carries.
enum class RuleGranularity : uint8_t {
  kPredicate,  // one feature per (rule, predicate), kNumRulePredicates of them
  kRule,       // one feature per rule, kNumRules of them
};

std::string_view granularity_name(RuleGranularity g);
std::optional<RuleGranularity> parse_granularity(std::string_view text);

int rule_feature_count(RuleGranularity g);
// -1 for leaves.
int rule_feature(RuleGranularity g, RuleId rule, Predicate predicate);

// Unique surfaces and (rule feature, surface) nodes of a set of trees. Node
// scores depend only on the feature and the surface tokens, so a batch lets
// a model encode each surface once.
struct NodeBatch {
  struct Node {
    int feature;
    int surface;
    bool operator==(const Node&) const = default;
  };
  std::vector<std::vector<std::string>> surfaces;
  std::vector<Node> nodes;

  int intern_surface(const std::vector<std::string>& tokens);
  int intern_node(int feature, int surface);
  void clear();

 private:
  std::map<std::vector<std::string>, int> surface_ids_;
  std::unordered_map<uint64_t, int> node_ids_;
};

// A tree as the multiset of its batch nodes.
struct TreeNodes {
  std::vector<int> nodes;
};

// Adds every internal node of d (surfaces taken from u under mode) to the
// batch and returns the tree's node list.
TreeNodes collect_nodes(const Derivation& d, const AbstractedUtterance& u, SurfaceMode mode, RuleGranularity g,
                        NodeBatch& batch);

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind : uint8_t { kSparse = 1, kNeural = 2 };

std::string_view model_kind_name(ModelKind kind);

struct ModelConfig {
  SurfaceMode mode = SurfaceMode::kBidirectional;
  RuleGranularity granularity = RuleGranularity::kPredicate;
};

// Shared interface of the sparse and neural scorers. Parameters live in one
// flat vector so the optimizer is model-agnostic.
class Model : public Scorer {
 public:
  // Per-surface precomputation (n-gram rows, encoder states).
  class SurfaceState {
   public:
    virtual ~SurfaceState() = default;
  };

  explicit Model(ModelConfig config) : config_(config) {}

  virtual ModelKind kind() const = 0;
  const ModelConfig& config() const { return config_; }
  int feature_count() const { return rule_feature_count(config_.granularity); }
  int feature(RuleId rule, Predicate predicate) const { return rule_feature(config_.granularity, rule, predicate); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  virtual std::unique_ptr<SurfaceState> encode(const std::vector<std::string>& tokens) const = 0;
  virtual double score(const SurfaceState& state, int feature) const = 0;
  // grad += sum over (feature, g) of g * d score(state, feature) / d params.
  virtual void backward(const SurfaceState& state, const std::vector<std::pair<int, double>>& feature_grads,
                        double* grad) const = 0;

  // Lets a model grow its parameter set for surfaces seen in training.
  virtual void register_surfaces(const NodeBatch&) {}

  using States = std::vector<std::unique_ptr<SurfaceState>>;
  States encode_batch(const NodeBatch& batch) const;
  std::vector<double> score_batch(const NodeBatch& batch, const States& states) const;
  std::vector<double> score_batch(const NodeBatch& batch) const;
  // grad (resized to params().size() when smaller) += sum_n dnode[n] * d score(n) / d params.
  void gradient_batch(const NodeBatch& batch, const States& states, const std::vector<double>& dnode,
                      std::vector<double>& grad) const;

  std::unique_ptr<NodeScorer> bind(const AbstractedUtterance& u) const override;

  void save(const std::string& path) const;
  void save(std::ostream& out) const;

 protected:
  virtual void save_body(std::ostream& out) const = 0;

  ModelConfig config_;
  std::vector<double> params_;
};

std::unique_ptr<Model> load_model(const std::string& path);
std::unique_ptr<Model> load_model(std::istream& in);

// Log-linear n-gram scorer: score = f_s . (W f_r), f_s the binary indicator of
// the hashed 1..3-grams of the surface (with <s>, </s> padding). Rows of W
// exist only for buckets registered from training surfaces; others are zero.
class SparseModel : public Model {
 public:
  static constexpr uint32_t kBuckets = 1u << 20;
  static constexpr int kOrder = 3;

  explicit SparseModel(ModelConfig config = {});

  ModelKind kind() const override { return ModelKind::kSparse; }
  static std::vector<uint32_t> features(const std::vector<std::string>& tokens);

  std::unique_ptr<SurfaceState> encode(const std::vector<std::string>& tokens) const override;
  double score(const SurfaceState& state, int feature) const override;
  void backward(const SurfaceState& state, const std::vector<std::pair<int, double>>& feature_grads,
                double* grad) const override;
  void register_surfaces(const NodeBatch& batch) override;

  size_t rows() const { return buckets_.size(); }
  // Parameter index of W[bucket, feature], or -1 when the bucket has no row.
  long param_index(uint32_t bucket, int feature) const;

  static std::unique_ptr<SparseModel> read_body(std::istream& in, ModelConfig config);

 protected:
  void save_body(std::ostream& out) const override;

 private:
  std::vector<uint32_t> buckets_;
  std::unordered_map<uint32_t, uint32_t> row_of_;
};

struct NeuralDims {
  int token = 100;      // token embedding size
  int hidden = 50;      // per direction; also the rule embedding size
  int attention = 50;   // rows of W1 and W2
};

// Rule embedding e_r = R f_r; tokens embedded and run through a forward and a
// backward LSTM (zero initial state) whose states are summed into h_i;
// u_i = theta . tanh(W1 h_i + W2 e_r), a = softmax(u), e_s = sum a_i h_i,
// score = e_r . e_s.
class NeuralModel : public Model {
 public:
  // Token inventory: vocabulary entries, the symbol letters, <unk>, <empty>.
  NeuralModel(std::vector<std::string> tokens, ModelConfig config = {}, NeuralDims dims = {});
  static std::vector<std::string> token_inventory(const Vocabulary& vocab);

  ModelKind kind() const override { return ModelKind::kNeural; }
  const NeuralDims& dims() const { return dims_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  int token_id(const std::string& token) const;

  // Uniform in [-scale, scale] from a seeded generator.
  void init_uniform(uint64_t seed, double scale = 0.08);

  std::unique_ptr<SurfaceState> encode(const std::vector<std::string>& tokens) const override;
  double score(const SurfaceState& state, int feature) const override;
  void backward(const SurfaceState& state, const std::vector<std::pair<int, double>>& feature_grads,
                double* grad) const override;

  // Attention weights of one node, for inspection.
  std::vector<double> attention(const SurfaceState& state, int feature) const;

  // Parameter blocks (offsets into params()).
  struct Layout {
    size_t embed, rule;
    size_t fwd_wx, fwd_wh, fwd_b;
    size_t bwd_wx, bwd_wh, bwd_b;
    size_t w1, w2, theta;
    size_t total;
  };
  const Layout& layout() const { return layout_; }

  static std::unique_ptr<NeuralModel> read_body(std::istream& in, ModelConfig config);

 protected:
  void save_body(std::ostream& out) const override;

 private:
  struct State;
  void run_lstm(size_t wx, size_t wh, size_t b, const std::vector<int>& ids, bool reverse, State& s, int dir) const;

  NeuralDims dims_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> token_ids_;
  int unk_id_ = 0;
  Layout layout_{};
};

// Per-node scores of a derivation; total is their sum.
struct TreeScore {
  struct NodeScore {
    const DerivationNode* node;
    double score;
  };
  std::vector<NodeScore> per_node;
  double total = 0;
};

TreeScore tree_logscore(const Model& model, const Derivation& d, const AbstractedUtterance& u);

// Softmax over tree totals.
std::vector<double> tree_probabilities(const std::vector<double>& totals);

}  // namespace tq

#endif  // TABLEQUERY_SCORING_HPP_
