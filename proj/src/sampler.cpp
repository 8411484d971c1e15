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

#include "kgpl/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace kgpl {

std::vector<double> walk_counts(const KnowledgeGraph& kg, const ItemSet& sources,
                                unsigned horizon) {
  const std::size_t n = kg.num_entities();
  std::vector<double> current(n, 0.0), next(n, 0.0), total(n, 0.0);
  for (ItemId s : sources)
    if (s < n) current[s] = 1.0;

  for (unsigned step = 0; step < horizon; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    bool any = false;
    for (EntityId e = 0; e < n; ++e) {
      if (current[e] == 0.0) continue;
      any = true;
      for (const auto& nb : kg.neighbors(e)) next[nb.entity] += current[e];
    }
    if (!any) break;
    for (std::size_t e = 0; e < n; ++e) total[e] += next[e];
    current.swap(next);
  }
  return total;
}

PathCountVector count_paths(const KnowledgeGraph& kg, std::size_t num_items,
                            const ItemSet& observed, unsigned horizon, double cap,
                            UserId user) {
  if (horizon == 0) throw UsageError("path horizon must be >= 1");
  PathCountVector out;
  out.user = user;
  out.horizon = horizon;
  out.observed = observed;
  out.counts.assign(num_items, kUnreachableFloor);

  std::vector<double> walks;
  if (!observed.empty()) walks = walk_counts(kg, observed, horizon);
  for (ItemId i = 0; i < num_items; ++i) {
    if (contains(observed, i)) {
      out.counts[i] = 0.0;
      continue;
    }
    const double w = i < walks.size() ? walks[i] : 0.0;
    if (w > 0.0) out.counts[i] = std::min(w, cap);
  }
  return out;
}

SamplingDistribution pseudo_distribution(const PathCountVector& counts, double a) {
  std::vector<ItemId> support;
  std::vector<double> weights;
  support.reserve(counts.counts.size());
  weights.reserve(counts.counts.size());
  for (ItemId i = 0; i < counts.counts.size(); ++i) {
    if (contains(counts.observed, i)) continue;
    support.push_back(i);
    weights.push_back(std::pow(counts.counts[i], a));
  }
  if (support.empty()) throw DataError("user has no unobserved items");
  return SamplingDistribution::from_weights(std::move(support), weights);
}

SamplingDistribution negative_distribution(const std::vector<std::uint32_t>& item_freq,
                                           const ItemSet& observed, double b) {
  std::vector<ItemId> support;
  std::vector<double> weights;
  support.reserve(item_freq.size());
  weights.reserve(item_freq.size());
  for (ItemId i = 0; i < item_freq.size(); ++i) {
    if (contains(observed, i)) continue;
    const double m = item_freq[i] > 0 ? static_cast<double>(item_freq[i]) : kUnreachableFloor;
    support.push_back(i);
    weights.push_back(std::pow(m, b));
  }
  if (support.empty()) throw DataError("user has no unobserved items");
  return SamplingDistribution::from_weights(std::move(support), weights);
}

TrainingSampler::TrainingSampler(const InteractionData& data, const KnowledgeGraph& kg,
                                 const SamplerOptions& options)
    : data_(&data), options_(options) {
  for (UserId u = 0; u < data.num_users; ++u) {
    const auto& pos = data.train_pos[u];
    if (!pos.empty() && pos.size() < data.num_items) eligible_.push_back(u);
  }
  if (eligible_.empty()) throw DataError("no user has a train positive");

  global_negative_ = negative_distribution(
      data.item_freq, {}, options.popularity_negatives ? options.b : 0.0);
  global_uniform_ = negative_distribution(data.item_freq, {}, 0.0);

  if (options.kg_aware) {
    pseudo_.resize(data.num_users);
    for (UserId u : eligible_) {
      const auto counts =
          count_paths(kg, data.num_items, data.train_pos[u], options.horizon, options.path_cap, u);
      pseudo_[u] = pseudo_distribution(counts, options.a);
    }
  }
}

UserId TrainingSampler::draw_user(Rng& rng) const {
  return eligible_[rng.below(eligible_.size())];
}

ItemId TrainingSampler::draw_positive(UserId u, Rng& rng) const {
  const auto& pos = data_->train_pos[u];
  return pos[rng.below(pos.size())];
}

ItemId TrainingSampler::draw_excluding(const SamplingDistribution& global,
                                       const ItemSet& excluded, Rng& rng) const {
  // Rejection keeps the conditional law exact; after repeated misses the
  // remaining draw comes from the explicit conditional table, which has the
  // same law.
  for (int attempt = 0; attempt < 64; ++attempt) {
    const ItemId i = global.draw(rng);
    if (!contains(excluded, i)) return i;
  }
  std::vector<ItemId> support;
  std::vector<double> weights;
  const auto probs = global.probabilities();
  const auto items = global.support();
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (contains(excluded, items[k])) continue;
    support.push_back(items[k]);
    weights.push_back(probs[k]);
  }
  return SamplingDistribution::from_weights(std::move(support), weights).draw(rng);
}

ItemId TrainingSampler::draw_negative(UserId u, Rng& rng) const {
  return draw_excluding(global_negative_, data_->train_pos[u], rng);
}

ItemId TrainingSampler::draw_pseudo(UserId u, Rng& rng) const {
  if (options_.kg_aware) return pseudo_[u].draw(rng);
  return draw_excluding(global_uniform_, data_->train_pos[u], rng);
}

SamplingDistribution TrainingSampler::negative_distribution_for(UserId u) const {
  return negative_distribution(data_->item_freq, data_->train_pos[u],
                               options_.popularity_negatives ? options_.b : 0.0);
}

SamplingDistribution TrainingSampler::pseudo_distribution_for(UserId u) const {
  if (options_.kg_aware && u < pseudo_.size() && !pseudo_[u].empty()) return pseudo_[u];
  return negative_distribution(data_->item_freq, data_->train_pos[u], 0.0);
}

MiniBatch sample_minibatch(const TrainingSampler& sampler, const Labeler& labeler,
                           const BatchRequest& request, Rng& rng) {
  if (request.triples == 0) throw UsageError("batch must contain at least one triple");
  MiniBatch batch;
  const std::size_t pseudo_rows = request.include_pseudo ? request.pseudo_per_positive : 0;
  batch.rows.reserve(request.triples * (2 + pseudo_rows));
  for (std::size_t t = 0; t < request.triples; ++t) {
    const UserId u = sampler.draw_user(rng);
    const ItemId pos = sampler.draw_positive(u, rng);
    const ItemId neg = sampler.draw_negative(u, rng);
    batch.rows.push_back({u, pos, 1.0, RowKind::kPositive, -1});
    batch.rows.push_back({u, neg, 0.0, RowKind::kNegative, -1});
    for (std::size_t k = 0; k < pseudo_rows; ++k) {
      const ItemId item = sampler.draw_pseudo(u, rng);
      batch.rows.push_back({u, item, labeler(u, item), RowKind::kPseudo, request.label_source});
    }
  }
  return batch;
}

}  // namespace kgpl
