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

#ifndef KGPL_SAMPLER_HPP_
#define KGPL_SAMPLER_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "kgpl/data.hpp"
#include "kgpl/kg_store.hpp"
#include "kgpl/rng.hpp"
#include "kgpl/sampling_distribution.hpp"

namespace kgpl {

inline constexpr double kUnreachableFloor = 0.5;
inline constexpr double kDefaultPathCap = 1e6;

// Per-item walk counts n_{u,i} from a user's observed items.
struct PathCountVector {
  UserId user = 0;
  unsigned horizon = 0;
  double unreachable_floor = kUnreachableFloor;
  ItemSet observed;            // excluded from every distribution
  std::vector<double> counts;  // size num_items; entries for observed items are 0
};

// Sum over l = 1..horizon of the number of length-l walks from `sources`
// to each entity (one walk per adjacency entry traversed). No cap.
std::vector<double> walk_counts(const KnowledgeGraph& kg, const ItemSet& sources,
                                unsigned horizon);

// Walk counts restricted to items, clamped to `cap`; unreachable unobserved
// items get the 0.5 floor. An empty `observed` yields the all-floor vector.
PathCountVector count_paths(const KnowledgeGraph& kg, std::size_t num_items,
                            const ItemSet& observed, unsigned horizon,
                            double cap = kDefaultPathCap, UserId user = 0);

// q(i|u) proportional to n_{u,i}^a over unobserved items.
SamplingDistribution pseudo_distribution(const PathCountVector& counts, double a);

// p(i|u) proportional to m_i^b over unobserved items; m_i = 0 is floored to
// 0.5 before exponentiation.
SamplingDistribution negative_distribution(const std::vector<std::uint32_t>& item_freq,
                                           const ItemSet& observed, double b);

enum class RowKind : std::uint8_t { kPositive = 0, kNegative = 1, kPseudo = 2 };

struct BatchRow {
  UserId user;
  ItemId item;
  double label;
  RowKind kind;
  int label_source;  // id of the model that produced the pseudo label, -1 otherwise
};

struct MiniBatch {
  std::vector<BatchRow> rows;
  bool empty() const noexcept { return rows.empty(); }
};

struct SamplerOptions {
  double a = 0.5;               // pseudo skew
  double b = 0.5;               // negative skew
  unsigned horizon = 6;         // BFS depth h
  double path_cap = kDefaultPathCap;
  bool kg_aware = true;         // false: uniform pseudo candidates (rand_*)
  bool popularity_negatives = true;  // false: uniform negatives (uns)
};

// Holds the per-user sampling distributions used to assemble mini-batches.
// Immutable after construction, so draws may run concurrently with
// separately seeded Rngs.
class TrainingSampler {
 public:
  TrainingSampler(const InteractionData& data, const KnowledgeGraph& kg,
                  const SamplerOptions& options);

  const InteractionData& data() const noexcept { return *data_; }
  const SamplerOptions& options() const noexcept { return options_; }

  // Users with at least one train positive and one unobserved item.
  const std::vector<UserId>& eligible_users() const noexcept { return eligible_; }

  UserId draw_user(Rng& rng) const;
  ItemId draw_positive(UserId u, Rng& rng) const;
  ItemId draw_negative(UserId u, Rng& rng) const;
  ItemId draw_pseudo(UserId u, Rng& rng) const;

  // Exact per-user distributions (for inspection and tests).
  SamplingDistribution negative_distribution_for(UserId u) const;
  SamplingDistribution pseudo_distribution_for(UserId u) const;

 private:
  // Draw from `global` conditioned on leaving `excluded`.
  ItemId draw_excluding(const SamplingDistribution& global, const ItemSet& excluded,
                        Rng& rng) const;

  const InteractionData* data_;
  SamplerOptions options_;
  std::vector<UserId> eligible_;
  SamplingDistribution global_negative_;
  SamplingDistribution global_uniform_;
  std::vector<SamplingDistribution> pseudo_;  // per user, when kg_aware
};

using Labeler = std::function<double(UserId, ItemId)>;

struct BatchRequest {
  std::size_t triples = 1;
  std::size_t pseudo_per_positive = 1;
  bool include_pseudo = true;
  int label_source = 0;
};

// Per triple: a uniform eligible user, a uniform train
// positive (label 1), a negative (label 0) and pseudo candidates labelled by
// `labeler` at sampling time.
MiniBatch sample_minibatch(const TrainingSampler& sampler, const Labeler& labeler,
                           const BatchRequest& request, Rng& rng);

}  // namespace kgpl

#endif  // KGPL_SAMPLER_HPP_
