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

#include "tablequery/scoring.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "tablequery/kernels.hpp"

namespace tq {

static_assert(std::endian::native == std::endian::little, "model files are written in host order");

std::string_view granularity_name(RuleGranularity g) {
  return g == RuleGranularity::kPredicate ? "predicate" : "rule";
}

std::optional<RuleGranularity> parse_granularity(std::string_view text) {
  if (text == "predicate") return RuleGranularity::kPredicate;
  if (text == "rule") return RuleGranularity::kRule;
  return std::nullopt;
}

int rule_feature_count(RuleGranularity g) { return g == RuleGranularity::kPredicate ? kNumRulePredicates : kNumRules; }

int rule_feature(RuleGranularity g, RuleId rule, Predicate predicate) {
  if (rule == RuleId::kLeaf) return -1;
  return g == RuleGranularity::kPredicate ? rule_predicate_index(rule, predicate) : rule_index(rule);
}

int NodeBatch::intern_surface(const std::vector<std::string>& tokens) {
  auto [it, fresh] = surface_ids_.emplace(tokens, static_cast<int>(surfaces.size()));
  if (fresh) surfaces.push_back(tokens);
  return it->second;
}

int NodeBatch::intern_node(int feature, int surface) {
  const uint64_t key = (static_cast<uint64_t>(feature) << 32) | static_cast<uint32_t>(surface);
  auto [it, fresh] = node_ids_.emplace(key, static_cast<int>(nodes.size()));
  if (fresh) nodes.push_back({feature, surface});
  return it->second;
}

void NodeBatch::clear() {
  surfaces.clear();
  nodes.clear();
  surface_ids_.clear();
  node_ids_.clear();
}

TreeNodes collect_nodes(const Derivation& d, const AbstractedUtterance& u, SurfaceMode mode, RuleGranularity g,
                        NodeBatch& batch) {
  TreeNodes out;
  d.visit([&](const DerivationNode& n) {
    if (n.is_leaf()) return;
    const int s = batch.intern_surface(surface(u, n.span, mode).tokens);
    out.nodes.push_back(batch.intern_node(rule_feature(g, n.rule, n.predicate), s));
  });
  return out;
}

std::string_view model_kind_name(ModelKind kind) { return kind == ModelKind::kSparse ? "sparse" : "neural"; }

// ---------------------------------------------------------------------------
// Model

Model::States Model::encode_batch(const NodeBatch& batch) const {
  States states;
  states.reserve(batch.surfaces.size());
  for (const auto& s : batch.surfaces) states.push_back(encode(s));
  return states;
}

std::vector<double> Model::score_batch(const NodeBatch& batch, const States& states) const {
  std::vector<double> out(batch.nodes.size());
  for (size_t i = 0; i < batch.nodes.size(); ++i) out[i] = score(*states[batch.nodes[i].surface], batch.nodes[i].feature);
  return out;
}

std::vector<double> Model::score_batch(const NodeBatch& batch) const { return score_batch(batch, encode_batch(batch)); }

void Model::gradient_batch(const NodeBatch& batch, const States& states, const std::vector<double>& dnode,
                           std::vector<double>& grad) const {
  if (grad.size() < params_.size()) grad.resize(params_.size(), 0.0);
  std::vector<std::vector<std::pair<int, double>>> per_surface(batch.surfaces.size());
  for (size_t i = 0; i < batch.nodes.size(); ++i) {
    if (dnode[i] != 0.0) per_surface[batch.nodes[i].surface].emplace_back(batch.nodes[i].feature, dnode[i]);
  }
  for (size_t s = 0; s < per_surface.size(); ++s) {
    if (!per_surface[s].empty()) backward(*states[s], per_surface[s], grad.data());
  }
}

namespace {

class BoundModel : public NodeScorer {
 public:
  BoundModel(const Model& m, const AbstractedUtterance& u) : model_(m), u_(u) {}

  double score(RuleId rule, Predicate predicate, Span span) override {
    const int f = model_.feature(rule, predicate);
    const int s = batch_.intern_surface(surface(u_, span, model_.config().mode).tokens);
    if (static_cast<size_t>(s) == states_.size()) states_.push_back(model_.encode(batch_.surfaces[s]));
    const int n = batch_.intern_node(f, s);
    if (static_cast<size_t>(n) == scores_.size()) scores_.push_back(model_.score(*states_[s], f));
    return scores_[n];
  }

 private:
  const Model& model_;
  const AbstractedUtterance& u_;
  NodeBatch batch_;
  Model::States states_;
  std::vector<double> scores_;
};

constexpr char kMagic[4] = {'T', 'Q', 'M', 'D'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ModelFormatError("model file truncated");
  return v;
}

}  // namespace

std::unique_ptr<NodeScorer> Model::bind(const AbstractedUtterance& u) const { return std::make_unique<BoundModel>(*this, u); }

void Model::save(std::ostream& out) const {
  out.write(kMagic, 4);
  put<uint32_t>(out, kVersion);
  put<uint8_t>(out, static_cast<uint8_t>(kind()));
  put<uint8_t>(out, static_cast<uint8_t>(config_.mode));
  put<uint8_t>(out, static_cast<uint8_t>(config_.granularity));
  save_body(out);
  put<uint64_t>(out, params_.size());
  for (double p : params_) put<float>(out, static_cast<float>(p));
}

void Model::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path);
  save(out);
  if (!out) throw std::runtime_error("failed writing model file " + path);
}

std::unique_ptr<Model> load_model(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ModelFormatError("not a model file");
  if (get<uint32_t>(in) != kVersion) throw ModelFormatError("unsupported model file version");
  const auto kind = get<uint8_t>(in);
  const auto mode = get<uint8_t>(in);
  const auto gran = get<uint8_t>(in);
  if (mode > static_cast<uint8_t>(SurfaceMode::kBidirectional) || gran > 1) throw ModelFormatError("bad model header");
  ModelConfig config{static_cast<SurfaceMode>(mode), static_cast<RuleGranularity>(gran)};
  std::unique_ptr<Model> model;
  if (kind == static_cast<uint8_t>(ModelKind::kSparse)) {
    model = SparseModel::read_body(in, config);
  } else if (kind == static_cast<uint8_t>(ModelKind::kNeural)) {
    model = NeuralModel::read_body(in, config);
  } else {
    throw ModelFormatError("unknown model kind");
  }
  const auto n = get<uint64_t>(in);
  if (n != model->params().size()) throw ModelFormatError("parameter count does not match the model dimensions");
  for (double& p : model->params()) p = get<float>(in);
  return model;
}

std::unique_ptr<Model> load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  return load_model(in);
}

// ---------------------------------------------------------------------------
// SparseModel

namespace {

struct SparseState : Model::SurfaceState {
  std::vector<long> rows;  // offsets of registered rows, in bucket order
};

uint64_t fnv1a(std::string_view s, uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

SparseModel::SparseModel(ModelConfig config) : Model(config) {}

std::vector<uint32_t> SparseModel::features(const std::vector<std::string>& tokens) {
  std::vector<std::string> padded;
  padded.reserve(tokens.size() + 2);
  padded.emplace_back("<s>");
  padded.insert(padded.end(), tokens.begin(), tokens.end());
  padded.emplace_back("</s>");
  std::vector<uint32_t> out;
  for (int n = 1; n <= kOrder; ++n) {
    for (size_t i = 0; i + n <= padded.size(); ++i) {
      uint64_t h = fnv1a(padded[i]);
      for (int k = 1; k < n; ++k) h = fnv1a(padded[i + k], fnv1a("\x1f", h));
      out.push_back(static_cast<uint32_t>(h & (kBuckets - 1)));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

long SparseModel::param_index(uint32_t bucket, int feature) const {
  auto it = row_of_.find(bucket);
  if (it == row_of_.end()) return -1;
  return static_cast<long>(it->second) * feature_count() + feature;
}

std::unique_ptr<Model::SurfaceState> SparseModel::encode(const std::vector<std::string>& tokens) const {
  auto s = std::make_unique<SparseState>();
  for (uint32_t b : features(tokens)) {
    auto it = row_of_.find(b);
    if (it != row_of_.end()) s->rows.push_back(static_cast<long>(it->second) * feature_count());
  }
  return s;
}

double SparseModel::score(const SurfaceState& state, int feature) const {
  double total = 0;
  for (long r : static_cast<const SparseState&>(state).rows) total += params_[r + feature];
  return total;
}

void SparseModel::backward(const SurfaceState& state, const std::vector<std::pair<int, double>>& feature_grads,
                           double* grad) const {
  for (long r : static_cast<const SparseState&>(state).rows) {
    for (const auto& [f, g] : feature_grads) grad[r + f] += g;
  }
}

void SparseModel::register_surfaces(const NodeBatch& batch) {
  for (const auto& s : batch.surfaces) {
    for (uint32_t b : features(s)) {
      if (row_of_.emplace(b, static_cast<uint32_t>(buckets_.size())).second) {
        buckets_.push_back(b);
        params_.resize(params_.size() + feature_count(), 0.0);
      }
    }
  }
}

void SparseModel::save_body(std::ostream& out) const {
  put<uint64_t>(out, buckets_.size());
  for (uint32_t b : buckets_) put<uint32_t>(out, b);
}

std::unique_ptr<SparseModel> SparseModel::read_body(std::istream& in, ModelConfig config) {
  auto m = std::make_unique<SparseModel>(config);
  const auto rows = get<uint64_t>(in);
  if (rows > kBuckets) throw ModelFormatError("sparse model has more rows than buckets");
  for (uint64_t i = 0; i < rows; ++i) {
    const auto b = get<uint32_t>(in);
    if (b >= kBuckets || !m->row_of_.emplace(b, static_cast<uint32_t>(i)).second) {
      throw ModelFormatError("bad sparse bucket table");
    }
    m->buckets_.push_back(b);
  }
  m->params_.assign(rows * m->feature_count(), 0.0);
  return m;
}

// ---------------------------------------------------------------------------
// NeuralModel

struct NeuralModel::State : Model::SurfaceState {
  int n = 0;
  std::vector<int> ids;
  // Per direction, indexed by processing step: gate activations [i f g o],
  // cell and hidden states.
  std::vector<double> gates[2], cell[2], hid[2];
  std::vector<double> h;    // n x hidden, forward + backward state at each position
  std::vector<double> w1h;  // n x attention
};

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

NeuralModel::NeuralModel(std::vector<std::string> tokens, ModelConfig config, NeuralDims dims)
    : Model(config), dims_(dims), tokens_(std::move(tokens)) {
  if (dims_.token <= 0 || dims_.hidden <= 0 || dims_.attention <= 0) throw std::invalid_argument("bad neural dims");
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (!token_ids_.emplace(tokens_[i], static_cast<int>(i)).second) throw std::invalid_argument("duplicate token " + tokens_[i]);
  }
  auto it = token_ids_.find(kUnkToken);
  if (it == token_ids_.end() || !token_ids_.count(kEmptyToken)) throw std::invalid_argument("token list lacks <unk>/<empty>");
  unk_id_ = it->second;

  const size_t de = dims_.token, h = dims_.hidden, a = dims_.attention;
  size_t off = 0;
  auto take = [&](size_t n) {
    const size_t o = off;
    off += n;
    return o;
  };
  layout_.embed = take(tokens_.size() * de);
  layout_.rule = take(static_cast<size_t>(feature_count()) * h);
  layout_.fwd_wx = take(4 * h * de);
  layout_.fwd_wh = take(4 * h * h);
  layout_.fwd_b = take(4 * h);
  layout_.bwd_wx = take(4 * h * de);
  layout_.bwd_wh = take(4 * h * h);
  layout_.bwd_b = take(4 * h);
  layout_.w1 = take(a * h);
  layout_.w2 = take(a * h);
  layout_.theta = take(a);
  layout_.total = off;
  params_.assign(off, 0.0);
}

std::vector<std::string> NeuralModel::token_inventory(const Vocabulary& vocab) {
  std::vector<std::string> out(vocab.entries().begin(), vocab.entries().end());
  for (const char* s : {"T", "C", "V", "N", "D", kUnkToken, kEmptyToken}) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.emplace_back(s);
  }
  return out;
}

int NeuralModel::token_id(const std::string& token) const {
  auto it = token_ids_.find(token);
  return it == token_ids_.end() ? unk_id_ : it->second;
}

void NeuralModel::init_uniform(uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double& p : params_) p = dist(rng);
}

void NeuralModel::run_lstm(size_t wx, size_t wh, size_t b, const std::vector<int>& ids, bool reverse, State& s,
                           int dir) const {
  const auto& k = kernels::active();
  const size_t de = dims_.token, h = dims_.hidden, n = ids.size();
  s.gates[dir].assign(n * 4 * h, 0.0);
  s.cell[dir].assign(n * h, 0.0);
  s.hid[dir].assign(n * h, 0.0);
  std::vector<double> z(4 * h);
  for (size_t step = 0; step < n; ++step) {
    const size_t t = reverse ? n - 1 - step : step;
    const double* x = &params_[layout_.embed + ids[t] * de];
    std::copy_n(&params_[b], 4 * h, z.begin());
    k.gemv(&params_[wx], x, z.data(), 4 * h, de);
    if (step > 0) k.gemv(&params_[wh], &s.hid[dir][(step - 1) * h], z.data(), 4 * h, h);
    double* gt = &s.gates[dir][step * 4 * h];
    double* c = &s.cell[dir][step * h];
    double* hh = &s.hid[dir][step * h];
    for (size_t j = 0; j < h; ++j) {
      gt[j] = sigmoid(z[j]);
      gt[h + j] = sigmoid(z[h + j]);
      gt[2 * h + j] = std::tanh(z[2 * h + j]);
      gt[3 * h + j] = sigmoid(z[3 * h + j]);
      const double prev = step > 0 ? s.cell[dir][(step - 1) * h + j] : 0.0;
      c[j] = gt[h + j] * prev + gt[j] * gt[2 * h + j];
      hh[j] = gt[3 * h + j] * std::tanh(c[j]);
    }
    for (size_t j = 0; j < h; ++j) s.h[t * h + j] += hh[j];
  }
}

std::unique_ptr<Model::SurfaceState> NeuralModel::encode(const std::vector<std::string>& tokens) const {
  auto s = std::make_unique<State>();
  for (const auto& t : tokens) s->ids.push_back(token_id(t));
  if (s->ids.empty()) s->ids.push_back(token_id(kEmptyToken));
  s->n = static_cast<int>(s->ids.size());
  const size_t h = dims_.hidden, a = dims_.attention;
  s->h.assign(s->n * h, 0.0);
  run_lstm(layout_.fwd_wx, layout_.fwd_wh, layout_.fwd_b, s->ids, false, *s, 0);
  run_lstm(layout_.bwd_wx, layout_.bwd_wh, layout_.bwd_b, s->ids, true, *s, 1);
  s->w1h.assign(s->n * a, 0.0);
  for (int i = 0; i < s->n; ++i) kernels::active().gemv(&params_[layout_.w1], &s->h[i * h], &s->w1h[i * a], a, h);
  return s;
}

namespace {

// Attention forward for one node: t (n x a), weights, e_s.
struct Attn {
  std::vector<double> t, weights, es;
};

}  // namespace

static Attn attend(const std::vector<double>& params, const NeuralModel::Layout& L, const NeuralDims& d,
                   const std::vector<double>& h, const std::vector<double>& w1h, int n, int feature) {
  const auto& k = kernels::active();
  const size_t hd = d.hidden, a = d.attention;
  const double* er = &params[L.rule + feature * hd];
  std::vector<double> q(a, 0.0);
  k.gemv(&params[L.w2], er, q.data(), a, hd);
  Attn out;
  out.t.resize(n * a);
  out.weights.resize(n);
  double mx = -INFINITY;
  for (int i = 0; i < n; ++i) {
    for (size_t j = 0; j < a; ++j) out.t[i * a + j] = std::tanh(w1h[i * a + j] + q[j]);
    out.weights[i] = k.dot(&params[L.theta], &out.t[i * a], a);
    mx = std::max(mx, out.weights[i]);
  }
  double z = 0;
  for (double& w : out.weights) z += (w = std::exp(w - mx));
  for (double& w : out.weights) w /= z;
  out.es.assign(hd, 0.0);
  for (int i = 0; i < n; ++i) k.axpy(out.weights[i], &h[i * hd], out.es.data(), hd);
  return out;
}

double NeuralModel::score(const SurfaceState& state, int feature) const {
  const auto& s = static_cast<const State&>(state);
  const Attn at = attend(params_, layout_, dims_, s.h, s.w1h, s.n, feature);
  return kernels::active().dot(&params_[layout_.rule + feature * dims_.hidden], at.es.data(), dims_.hidden);
}

std::vector<double> NeuralModel::attention(const SurfaceState& state, int feature) const {
  const auto& s = static_cast<const State&>(state);
  return attend(params_, layout_, dims_, s.h, s.w1h, s.n, feature).weights;
}

void NeuralModel::backward(const SurfaceState& state, const std::vector<std::pair<int, double>>& feature_grads,
                           double* grad) const {
  const auto& k = kernels::active();
  const auto& s = static_cast<const State&>(state);
  const size_t hd = dims_.hidden, a = dims_.attention, de = dims_.token;
  const int n = s.n;
  std::vector<double> dh(n * hd, 0.0), des(hd), dq(a), dpre(a), der(hd);
  const double* theta = &params_[layout_.theta];
  const double* w1 = &params_[layout_.w1];
  const double* w2 = &params_[layout_.w2];

  for (const auto& [f, g] : feature_grads) {
    const double* er = &params_[layout_.rule + f * hd];
    const Attn at = attend(params_, layout_, dims_, s.h, s.w1h, n, f);
    // score = e_r . e_s
    for (size_t j = 0; j < hd; ++j) {
      der[j] = g * at.es[j];
      des[j] = g * er[j];
    }
    std::vector<double> da(n);
    double mean = 0;
    for (int i = 0; i < n; ++i) {
      da[i] = k.dot(des.data(), &s.h[i * hd], hd);
      mean += at.weights[i] * da[i];
    }
    std::fill(dq.begin(), dq.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double du = at.weights[i] * (da[i] - mean);
      const double* t = &at.t[i * a];
      k.axpy(du, t, grad + layout_.theta, a);
      for (size_t j = 0; j < a; ++j) dpre[j] = du * theta[j] * (1.0 - t[j] * t[j]);
      k.ger(1.0, dpre.data(), &s.h[i * hd], grad + layout_.w1, a, hd);
      k.gemv_t(w1, dpre.data(), &dh[i * hd], a, hd);
      k.axpy(at.weights[i], des.data(), &dh[i * hd], hd);
      k.axpy(1.0, dpre.data(), dq.data(), a);
    }
    k.ger(1.0, dq.data(), er, grad + layout_.w2, a, hd);
    k.gemv_t(w2, dq.data(), der.data(), a, hd);
    k.axpy(1.0, der.data(), grad + layout_.rule + f * hd, hd);
  }

  // Backpropagation through both recurrences; h_i feeds both directions.
  std::vector<double> dz(4 * hd), dh_next(hd), dc_next(hd);
  for (int dir = 0; dir < 2; ++dir) {
    const size_t wx = dir == 0 ? layout_.fwd_wx : layout_.bwd_wx;
    const size_t wh = dir == 0 ? layout_.fwd_wh : layout_.bwd_wh;
    const size_t b = dir == 0 ? layout_.fwd_b : layout_.bwd_b;
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    std::fill(dc_next.begin(), dc_next.end(), 0.0);
    for (int step = n - 1; step >= 0; --step) {
      const int t = dir == 0 ? step : n - 1 - step;
      const double* gt = &s.gates[dir][step * 4 * hd];
      const double* c = &s.cell[dir][step * hd];
      for (size_t j = 0; j < hd; ++j) {
        const double dhj = dh[t * hd + j] + dh_next[j];
        const double tc = std::tanh(c[j]);
        const double i = gt[j], fg = gt[hd + j], gg = gt[2 * hd + j], o = gt[3 * hd + j];
        const double dc = dc_next[j] + dhj * o * (1.0 - tc * tc);
        const double prev = step > 0 ? s.cell[dir][(step - 1) * hd + j] : 0.0;
        dz[j] = dc * gg * i * (1.0 - i);
        dz[hd + j] = dc * prev * fg * (1.0 - fg);
        dz[2 * hd + j] = dc * i * (1.0 - gg * gg);
        dz[3 * hd + j] = dhj * tc * o * (1.0 - o);
        dc_next[j] = dc * fg;
      }
      k.axpy(1.0, dz.data(), grad + b, 4 * hd);
      const double* x = &params_[layout_.embed + s.ids[t] * de];
      k.ger(1.0, dz.data(), x, grad + wx, 4 * hd, de);
      k.gemv_t(&params_[wx], dz.data(), grad + layout_.embed + s.ids[t] * de, 4 * hd, de);
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      if (step > 0) {
        k.ger(1.0, dz.data(), &s.hid[dir][(step - 1) * hd], grad + wh, 4 * hd, hd);
        k.gemv_t(&params_[wh], dz.data(), dh_next.data(), 4 * hd, hd);
      }
    }
  }
}

void NeuralModel::save_body(std::ostream& out) const {
  put<uint32_t>(out, dims_.token);
  put<uint32_t>(out, dims_.hidden);
  put<uint32_t>(out, dims_.attention);
  put<uint32_t>(out, static_cast<uint32_t>(tokens_.size()));
  for (const auto& t : tokens_) {
    put<uint32_t>(out, static_cast<uint32_t>(t.size()));
    out.write(t.data(), static_cast<std::streamsize>(t.size()));
  }
}

std::unique_ptr<NeuralModel> NeuralModel::read_body(std::istream& in, ModelConfig config) {
  NeuralDims dims;
  dims.token = static_cast<int>(get<uint32_t>(in));
  dims.hidden = static_cast<int>(get<uint32_t>(in));
  dims.attention = static_cast<int>(get<uint32_t>(in));
  if (dims.token <= 0 || dims.hidden <= 0 || dims.attention <= 0 || dims.token > 4096 || dims.hidden > 4096 ||
      dims.attention > 4096) {
    throw ModelFormatError("bad neural dims");
  }
  const auto count = get<uint32_t>(in);
  if (count > 1'000'000) throw ModelFormatError("token table too large");
  std::vector<std::string> tokens;
  for (uint32_t i = 0; i < count; ++i) {
    const auto len = get<uint32_t>(in);
    if (len > 4096) throw ModelFormatError("token too long");
    std::string t(len, '\0');
    if (!in.read(t.data(), len)) throw ModelFormatError("model file truncated");
    tokens.push_back(std::move(t));
  }
  try {
    return std::make_unique<NeuralModel>(std::move(tokens), config, dims);
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(e.what());
  }
}

// ---------------------------------------------------------------------------

TreeScore tree_logscore(const Model& model, const Derivation& d, const AbstractedUtterance& u) {
  TreeScore out;
  auto bound = model.bind(u);
  d.visit([&](const DerivationNode& n) {
    if (n.is_leaf()) return;
    const double v = bound->score(n.rule, n.predicate, n.span);
    out.per_node.push_back({&n, v});
    out.total += v;
  });
  return out;
}

std::vector<double> tree_probabilities(const std::vector<double>& totals) {
  std::vector<double> p(totals.size());
  if (totals.empty()) return p;
  const double mx = *std::max_element(totals.begin(), totals.end());
  double z = 0;
  for (size_t i = 0; i < totals.size(); ++i) z += (p[i] = std::exp(totals[i] - mx));
  for (double& v : p) v /= z;
  return p;
}

}  // namespace tq
