/* Copyright 2026 The KGPL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kgpl/model.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

namespace kgpl {

ModelParams ModelParams::zeros(const ModelDims& dims) {
  ModelParams p;
  p.dims = dims;
  p.users = Matrix(dims.num_users, dims.dim);
  p.entities = Matrix(dims.num_entities, dims.dim);
  p.relations = Matrix(dims.num_relations, dims.dim);
  p.weights.assign(dims.layers, Matrix(dims.dim, dims.dim));
  return p;
}

ModelParams ModelParams::initialize(const ModelDims& dims, std::uint64_t seed) {
  if (dims.dim == 0 || dims.layers == 0) throw UsageError("model needs dim >= 1 and layers >= 1");
  ModelParams p = zeros(dims);
  std::uint64_t tag = 0;
  for (Matrix* m : p.tensors()) {
    Rng rng = Rng::stream(seed, tag++);
    const double bound = std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
    for (double& v : m->flat()) v = rng.uniform(-bound, bound);
  }
  return p;
}

std::vector<Matrix*> ModelParams::tensors() {
  std::vector<Matrix*> out{&users, &entities, &relations};
  for (auto& w : weights) out.push_back(&w);
  return out;
}

std::vector<const Matrix*> ModelParams::tensors() const {
  std::vector<const Matrix*> out{&users, &entities, &relations};
  for (const auto& w : weights) out.push_back(&w);
  return out;
}

std::vector<std::string> ModelParams::tensor_names(std::size_t layers) {
  std::vector<std::string> out{"U", "E", "R"};
  for (std::size_t l = 0; l < layers; ++l) out.push_back("W" + std::to_string(l));
  return out;
}

bool ModelParams::all_finite() const {
  for (const Matrix* m : tensors())
    for (double v : m->flat())
      if (!std::isfinite(v)) return false;
  return true;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double clamped_logit(std::span<const double> u, std::span<const double> r) {
  return std::clamp(dot(u, r), -kScoreClamp, kScoreClamp);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Hashes activation regions (LeakyReLU sign, score clamp) so that the
// gradient check can discard stencils straddling a kink.
struct KinkPattern {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  void add(bool bit) {
    hash ^= bit ? 0x9e3779b97f4a7c15ULL : 0x7f4a7c159e3779b9ULL;
    hash *= 0x100000001b3ULL;
  }
};

void fill_relation_logits(const ModelParams& p, std::span<const double> u,
                          std::vector<double>& logits, std::vector<double>& scores,
                          KinkPattern* kinks) {
  const std::size_t n = p.relations.rows();
  logits.resize(n);
  scores.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double raw = dot(u, p.relations.row(k));
    if (kinks) kinks->add(std::abs(raw) < kScoreClamp);
    logits[k] = std::clamp(raw, -kScoreClamp, kScoreClamp);
    scores[k] = std::exp(logits[k]);
  }
}

double activate(double x, bool last) { return last ? std::tanh(x) : (x > 0.0 ? x : kLeakySlope * x); }

double activate_grad(double pre, bool last) {
  if (last) {
    const double t = std::tanh(pre);
    return 1.0 - t * t;
  }
  return pre > 0.0 ? 1.0 : kLeakySlope;
}

// Everything produced by one pass over a receptive field.
struct PassOutputs {
  std::vector<Matrix>* aggregated = nullptr;
  std::vector<Matrix>* preact = nullptr;
  std::vector<Matrix>* attention = nullptr;
  std::vector<Matrix>* masks = nullptr;  // filled when rng given and dropout > 0
};

// Computes hidden[0..L]. Every row of every layer is produced by the same
// arithmetic in the same order regardless of which field it belongs to,
// which makes single and batched scoring bit-identical.
void propagate(const ModelParams& p, const NeighborIndex& index, const ReceptiveField& field,
               const std::vector<double>& rel_scores, Rng* rng, double dropout,
               std::vector<Matrix>& hidden, const PassOutputs& outs, KinkPattern* kinks) {
  const std::size_t L = p.dims.layers;
  const std::size_t d = p.dims.dim;
  const std::size_t S = index.neighbor_size();
  const bool use_masks = rng != nullptr && dropout > 0.0;
  const double keep = 1.0 - dropout;

  hidden.resize(L + 1);
  const auto& layer0 = field.layers[0];
  hidden[0] = Matrix(layer0.size(), d);
  for (std::size_t r = 0; r < layer0.size(); ++r) {
    const auto src = p.entities.row(layer0[r]);
    std::copy(src.begin(), src.end(), hidden[0].row(r).begin());
  }
  if (outs.aggregated) outs.aggregated->assign(L, Matrix());
  if (outs.preact) outs.preact->assign(L, Matrix());
  if (outs.attention) outs.attention->assign(L, Matrix());
  if (outs.masks) outs.masks->assign(L, Matrix());

  std::vector<double> agg(d), pre(d), pi(S);
  for (std::size_t l = 0; l < L; ++l) {
    const bool last = l + 1 == L;
    const auto& rows = field.layers[l + 1];
    const Matrix& in = hidden[l];
    Matrix& out = hidden[l + 1];
    out = Matrix(rows.size(), d);
    const Matrix& W = p.weights[l];
    if (outs.aggregated) (*outs.aggregated)[l] = Matrix(rows.size(), d);
    if (outs.preact) (*outs.preact)[l] = Matrix(rows.size(), d);
    if (outs.attention) (*outs.attention)[l] = Matrix(rows.size(), S);
    if (outs.masks && use_masks) (*outs.masks)[l] = Matrix(rows.size(), d);

    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto nbrs = index.row(rows[r]);
      double denom = 0.0;
      for (std::size_t s = 0; s < S; ++s) denom += rel_scores[nbrs[s].relation];
      for (std::size_t s = 0; s < S; ++s) pi[s] = rel_scores[nbrs[s].relation] / denom;

      const auto self = in.row(field.self_pos[l][r]);
      std::copy(self.begin(), self.end(), agg.begin());
      for (std::size_t s = 0; s < S; ++s) {
        const auto h = in.row(field.nbr_pos[l][r * S + s]);
        const double w = pi[s];
        for (std::size_t k = 0; k < d; ++k) agg[k] += w * h[k];
      }
      std::fill(pre.begin(), pre.end(), 0.0);
      for (std::size_t k = 0; k < d; ++k) {
        const double a = agg[k];
        const auto wrow = W.row(k);
        for (std::size_t j = 0; j < d; ++j) pre[j] += a * wrow[j];
      }
      auto o = out.row(r);
      for (std::size_t j = 0; j < d; ++j) {
        if (kinks && !last) kinks->add(pre[j] > 0.0);
        o[j] = activate(pre[j], last);
      }
      if (use_masks) {
        for (std::size_t j = 0; j < d; ++j) {
          const double m = rng->uniform() < keep ? 1.0 / keep : 0.0;
          o[j] *= m;
          if (outs.masks) (*outs.masks)[l](r, j) = m;
        }
      }
      if (outs.aggregated) std::copy(agg.begin(), agg.end(), (*outs.aggregated)[l].row(r).begin());
      if (outs.preact) std::copy(pre.begin(), pre.end(), (*outs.preact)[l].row(r).begin());
      if (outs.attention) std::copy(pi.begin(), pi.end(), (*outs.attention)[l].row(r).begin());
    }
  }
}

std::uint32_t position_of(const std::vector<EntityId>& sorted, EntityId e) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), e);
  return static_cast<std::uint32_t>(it - sorted.begin());
}

double forward_impl(const ModelParams& p, const NeighborIndex& index, UserId user, ItemId item,
                    const ForwardOptions& options, ForwardCache& cache, KinkPattern* kinks) {
  const std::size_t d = p.dims.dim;
  const std::size_t L = p.dims.layers;
  const bool use_masks = options.train && options.dropout > 0.0;
  if (use_masks && options.rng == nullptr) throw UsageError("dropout requires an rng");
  Rng* rng = use_masks ? options.rng : nullptr;

  cache.user = user;
  cache.item = item;
  const ItemId target[1] = {item};
  cache.field = build_receptive_field(index, target, L);

  cache.user_vec.assign(p.users.row(user).begin(), p.users.row(user).end());
  cache.user_mask.clear();
  if (use_masks) {
    const double keep = 1.0 - options.dropout;
    cache.user_mask.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      cache.user_mask[k] = rng->uniform() < keep ? 1.0 / keep : 0.0;
      cache.user_vec[k] *= cache.user_mask[k];
    }
  }

  std::vector<double> scores;
  fill_relation_logits(p, cache.user_vec, cache.relation_logit, scores, kinks);
  PassOutputs outs{&cache.aggregated, &cache.preact, &cache.attention, &cache.masks};
  propagate(p, index, cache.field, scores, rng, options.dropout, cache.hidden, outs, kinks);

  cache.logit = dot(cache.user_vec, cache.hidden[L].row(0));
  cache.prob = sigmoid(cache.logit);
  return cache.prob;
}

// Accumulates d(loss)/d(params) for one cached forward, given dL/dlogit.
void backward(const ModelParams& p, const NeighborIndex& index, const ForwardCache& cache,
              double g_logit, ModelParams& grads) {
  const std::size_t d = p.dims.dim;
  const std::size_t L = p.dims.layers;
  const std::size_t S = index.neighbor_size();
  const auto& field = cache.field;

  std::vector<double> g_user(d);
  const auto final_row = cache.hidden[L].row(0);
  for (std::size_t k = 0; k < d; ++k) g_user[k] = g_logit * final_row[k];

  Matrix g_out(1, d);
  for (std::size_t k = 0; k < d; ++k) g_out(0, k) = g_logit * cache.user_vec[k];

  std::vector<double> g_rel(p.relations.rows(), 0.0);
  std::vector<double> g_pre(d), g_agg(d), g_pi(S);

  for (std::size_t l = L; l-- > 0;) {
    const bool last = l + 1 == L;
    const Matrix& in = cache.hidden[l];
    const Matrix& W = p.weights[l];
    Matrix& gW = grads.weights[l];
    Matrix g_in(in.rows(), d);
    const bool masked = !cache.masks[l].flat().empty();

    for (std::size_t r = 0; r < field.layers[l + 1].size(); ++r) {
      const auto pre = cache.preact[l].row(r);
      const auto agg = cache.aggregated[l].row(r);
      const auto pi = cache.attention[l].row(r);
      for (std::size_t j = 0; j < d; ++j) {
        double g = g_out(r, j);
        if (masked) g *= cache.masks[l](r, j);
        g_pre[j] = g * activate_grad(pre[j], last);
      }
      for (std::size_t k = 0; k < d; ++k) {
        auto gw = gW.row(k);
        const auto w = W.row(k);
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          gw[j] += agg[k] * g_pre[j];
          acc += w[j] * g_pre[j];
        }
        g_agg[k] = acc;
      }
      auto g_self = g_in.row(field.self_pos[l][r]);
      for (std::size_t k = 0; k < d; ++k) g_self[k] += g_agg[k];

      const auto nbrs = index.row(field.layers[l + 1][r]);
      double weighted = 0.0;
      for (std::size_t s = 0; s < S; ++s) {
        const std::uint32_t pos = field.nbr_pos[l][r * S + s];
        auto g_n = g_in.row(pos);
        for (std::size_t k = 0; k < d; ++k) g_n[k] += pi[s] * g_agg[k];
        g_pi[s] = dot(g_agg, in.row(pos));
        weighted += pi[s] * g_pi[s];
      }
      for (std::size_t s = 0; s < S; ++s) g_rel[nbrs[s].relation] += pi[s] * (g_pi[s] - weighted);
    }
    if (l > 0) {
      g_out = std::move(g_in);
    } else {
      for (std::size_t r = 0; r < field.layers[0].size(); ++r) {
        auto ge = grads.entities.row(field.layers[0][r]);
        const auto gi = g_in.row(r);
        for (std::size_t k = 0; k < d; ++k) ge[k] += gi[k];
      }
    }
  }

  for (std::size_t rel = 0; rel < g_rel.size(); ++rel) {
    if (g_rel[rel] == 0.0) continue;
    const double raw = cache.relation_logit[rel];
    if (std::abs(raw) >= kScoreClamp) continue;  // saturated: zero derivative
    const auto r_vec = p.relations.row(rel);
    auto gr = grads.relations.row(rel);
    for (std::size_t k = 0; k < d; ++k) {
      g_user[k] += g_rel[rel] * r_vec[k];
      gr[k] += g_rel[rel] * cache.user_vec[k];
    }
  }
  auto gu = grads.users.row(cache.user);
  for (std::size_t k = 0; k < d; ++k) {
    const double m = cache.user_mask.empty() ? 1.0 : cache.user_mask[k];
    gu[k] += g_user[k] * m;
  }
}

void reset_grads(const ModelParams& params, ModelParams& grads) {
  if (grads.dims == params.dims && grads.weights.size() == params.weights.size()) {
    for (Matrix* m : grads.tensors()) m->fill(0.0);
  } else {
    grads = ModelParams::zeros(params.dims);
  }
}

// Row-level seeds so that mask draws do not depend on the worker count.
std::vector<std::uint64_t> row_seeds(std::size_t n, double dropout, Rng& rng) {
  std::vector<std::uint64_t> seeds(n, 0);
  if (dropout > 0.0)
    for (auto& s : seeds) s = rng.next_u64();
  return seeds;
}

double batch_loss_impl(const MiniBatch& batch, const ModelParams& params,
                       const NeighborIndex& index, double dropout, Rng& rng, KinkPattern* kinks) {
  const auto seeds = row_seeds(batch.rows.size(), dropout, rng);
  double total = 0.0;
  ForwardCache cache;
  for (std::size_t k = 0; k < batch.rows.size(); ++k) {
    const auto& row = batch.rows[k];
    Rng row_rng(seeds[k]);
    ForwardOptions opt{true, dropout, &row_rng};
    const double prob = forward_impl(params, index, row.user, row.item, opt, cache, kinks);
    total += bce_loss(row.label, prob);
  }
  return total / static_cast<double>(batch.rows.size());
}

}  // namespace

double relation_score(std::span<const double> u, std::span<const double> r) {
  return std::exp(clamped_logit(u, r));
}

ReceptiveField build_receptive_field(const NeighborIndex& index, std::span<const ItemId> targets,
                                     std::size_t layers) {
  ReceptiveField field;
  field.layers.resize(layers + 1);
  field.self_pos.resize(layers);
  field.nbr_pos.resize(layers);
  auto& top = field.layers[layers];
  top.assign(targets.begin(), targets.end());
  std::sort(top.begin(), top.end());
  top.erase(std::unique(top.begin(), top.end()), top.end());

  const std::size_t S = index.neighbor_size();
  for (std::size_t l = layers; l-- > 0;) {
    const auto& upper = field.layers[l + 1];
    auto& lower = field.layers[l];
    lower.reserve(upper.size() * (S + 1));
    for (EntityId e : upper) {
      lower.push_back(e);
      for (const auto& nb : index.row(e)) lower.push_back(nb.entity);
    }
    std::sort(lower.begin(), lower.end());
    lower.erase(std::unique(lower.begin(), lower.end()), lower.end());

    auto& self_pos = field.self_pos[l];
    auto& nbr_pos = field.nbr_pos[l];
    self_pos.resize(upper.size());
    nbr_pos.resize(upper.size() * S);
    for (std::size_t r = 0; r < upper.size(); ++r) {
      self_pos[r] = position_of(lower, upper[r]);
      const auto row = index.row(upper[r]);
      for (std::size_t s = 0; s < S; ++s) nbr_pos[r * S + s] = position_of(lower, row[s].entity);
    }
  }
  return field;
}

double forward(const ModelParams& params, const NeighborIndex& index, UserId user, ItemId item,
               const ForwardOptions& options, ForwardCache* cache) {
  ForwardCache local;
  return forward_impl(params, index, user, item, options, cache ? *cache : local, nullptr);
}

double bce_loss(double label, double prob) {
  const double p = std::clamp(prob, kProbEpsilon, 1.0 - kProbEpsilon);
  return -label * std::log(p) - (1.0 - label) * std::log(1.0 - p);
}

double loss_and_grad(const MiniBatch& batch, const ModelParams& params,
                     const NeighborIndex& index, double dropout, Rng& rng, ModelParams& grads,
                     std::size_t workers) {
  if (batch.rows.empty()) throw UsageError("empty mini-batch");
  reset_grads(params, grads);
  const auto seeds = row_seeds(batch.rows.size(), dropout, rng);
  const double scale = 1.0 / static_cast<double>(batch.rows.size());

  auto run_rows = [&](std::size_t begin, std::size_t end, ModelParams& g, double& loss) {
    ForwardCache cache;
    for (std::size_t k = begin; k < end; ++k) {
      const auto& row = batch.rows[k];
      Rng row_rng(seeds[k]);
      ForwardOptions opt{true, dropout, &row_rng};
      const double prob = forward_impl(params, index, row.user, row.item, opt, cache, nullptr);
      loss += bce_loss(row.label, prob);
      // d BCE / d logit; the label is a constant.
      backward(params, index, cache, (prob - row.label) * scale, g);
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, batch.rows.size()));
  double loss = 0.0;
  if (workers == 1) {
    run_rows(0, batch.rows.size(), grads, loss);
  } else {
    std::vector<ModelParams> partial(workers, ModelParams::zeros(params.dims));
    std::vector<double> partial_loss(workers, 0.0);
    std::vector<std::thread> threads;
    const std::size_t chunk = (batch.rows.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = std::min(batch.rows.size(), w * chunk);
      const std::size_t e = std::min(batch.rows.size(), b + chunk);
      threads.emplace_back([&, w, b, e] { run_rows(b, e, partial[w], partial_loss[w]); });
    }
    for (auto& t : threads) t.join();
    for (std::size_t w = 0; w < workers; ++w) {
      loss += partial_loss[w];
      auto dst = grads.tensors();
      auto src = std::as_const(partial[w]).tensors();
      for (std::size_t t = 0; t < dst.size(); ++t) {
        auto df = dst[t]->flat();
        const auto sf = src[t]->flat();
        for (std::size_t k = 0; k < df.size(); ++k) df[k] += sf[k];
      }
    }
  }
  return loss * scale;
}

double batch_loss(const MiniBatch& batch, const ModelParams& params, const NeighborIndex& index,
                  double dropout, Rng& rng) {
  if (batch.rows.empty()) throw UsageError("empty mini-batch");
  return batch_loss_impl(batch, params, index, dropout, rng, nullptr);
}

ItemScorer::ItemScorer(const ModelParams& params, const NeighborIndex& index,
                       std::vector<ItemId> items)
    : params_(&params), index_(&index), items_(std::move(items)) {
  field_ = build_receptive_field(index, items_, params.dims.layers);
  const auto& top = field_.layers[params.dims.layers];
  target_row_.resize(items_.size());
  for (std::size_t k = 0; k < items_.size(); ++k) target_row_[k] = position_of(top, items_[k]);
}

void ItemScorer::score_logits(UserId user, std::span<double> out) const {
  const ModelParams& p = *params_;
  const auto u = p.users.row(user);
  std::vector<double> logits, scores;
  fill_relation_logits(p, u, logits, scores, nullptr);
  std::vector<Matrix> hidden;
  propagate(p, *index_, field_, scores, nullptr, 0.0, hidden, {}, nullptr);
  const Matrix& final_rows = hidden[p.dims.layers];
  for (std::size_t k = 0; k < items_.size(); ++k) out[k] = dot(u, final_rows.row(target_row_[k]));
}

void ItemScorer::score(UserId user, std::span<double> out) const {
  score_logits(user, out);
  for (double& v : out) v = sigmoid(v);
}

std::vector<double> score_items(const ModelParams& params, const NeighborIndex& index,
                                UserId user, std::span<const ItemId> items) {
  std::vector<double> out(items.size());
  if (items.empty()) return out;
  ItemScorer scorer(params, index, {items.begin(), items.end()});
  scorer.score(user, out);
  return out;
}

GradCheckResult gradient_check(const GradCheckSpec& spec) {
  Rng rng = Rng::stream(spec.seed, 0x67726164);
  const std::size_t num_items = 8, num_entities = 16, num_relations = 3, num_users = 4;

  // Item 7 never appears in a triple, so its row is self-relation padding.
  auto pick = [&] {
    const auto e = static_cast<EntityId>(rng.below(num_entities - 2));
    return e == num_items - 1 ? static_cast<EntityId>(num_entities - 2) : e;
  };
  std::vector<Triple> triples;
  for (int k = 0; k < 22; ++k) {
    const EntityId h = pick();
    const auto r = static_cast<RelationId>(rng.below(num_relations));
    triples.push_back({h, r, pick()});
  }
  const auto kg = KnowledgeGraph::from_triples(triples, num_entities, num_relations);
  const auto index = build_neighbor_index(kg, spec.neighbor_size, rng.next_u64());

  ModelDims dims{num_users, kg.num_entities(), kg.num_relations() + 1, spec.dim, spec.layers};
  ModelParams params = ModelParams::initialize(dims, rng.next_u64());
  // Larger weights than the default init keep gradients well away from zero.
  for (Matrix* m : params.tensors())
    for (double& v : m->flat()) v *= 2.0;

  MiniBatch batch;
  for (int k = 0; k < 6; ++k) {
    const auto user = static_cast<UserId>(rng.below(num_users));
    const auto item = static_cast<ItemId>(rng.below(num_items));
    batch.rows.push_back({user, item, rng.uniform(0.05, 0.95), RowKind::kPseudo, 0});
  }
  batch.rows.push_back({0, static_cast<ItemId>(num_items - 1), 1.0, RowKind::kPositive, -1});
  batch.rows.push_back({1, 0, 0.0, RowKind::kNegative, -1});

  const std::uint64_t mask_seed = rng.next_u64();
  ModelParams analytic;
  {
    Rng mask_rng(mask_seed);
    loss_and_grad(batch, params, index, spec.dropout, mask_rng, analytic);
  }
  auto eval = [&](KinkPattern& kinks) {
    Rng mask_rng(mask_seed);
    return batch_loss_impl(batch, params, index, spec.dropout, mask_rng, &kinks);
  };
  KinkPattern base;
  eval(base);

  GradCheckResult result;
  const auto names = ModelParams::tensor_names(spec.layers);
  auto param_tensors = params.tensors();
  auto grad_tensors = std::as_const(analytic).tensors();
  for (std::size_t t = 0; t < param_tensors.size(); ++t) {
    GradCheckGroup group;
    group.name = names[t];
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    auto values = param_tensors[t]->flat();
    const auto grad = grad_tensors[t]->flat();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double saved = values[k];
      KinkPattern plus_k, minus_k;
      values[k] = saved + spec.step;
      const double plus = eval(plus_k);
      values[k] = saved - spec.step;
      const double minus = eval(minus_k);
      values[k] = saved;
      if (plus_k.hash != base.hash || minus_k.hash != base.hash) {
        ++group.skipped;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * spec.step);
      const double diff = grad[k] - numeric;
      diff2 += diff * diff;
      a2 += grad[k] * grad[k];
      n2 += numeric * numeric;
      group.max_abs_error = std::max(group.max_abs_error, std::abs(diff));
      ++group.coordinates;
    }
    const double denom = std::sqrt(a2) + std::sqrt(n2);
    group.relative_error = denom > 1e-12 ? std::sqrt(diff2) / denom : 0.0;
    result.max_relative_error = std::max(result.max_relative_error, group.relative_error);
    result.groups.push_back(group);
  }
  result.passed = result.max_relative_error < spec.tolerance;
  return result;
}

}  // namespace kgpl
