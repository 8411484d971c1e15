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

#ifndef KGPL_MODEL_HPP_
#define KGPL_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgpl/kg_store.hpp"
#include "kgpl/rng.hpp"
#include "kgpl/sampler.hpp"
#include "kgpl/types.hpp"

namespace kgpl {

inline constexpr double kLeakySlope = 0.2;
inline constexpr double kScoreClamp = 30.0;
inline constexpr double kProbEpsilon = 1e-7;

struct ModelDims {
  std::size_t num_users = 0;
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;  // including the synthetic self relation
  std::size_t dim = 0;
  std::size_t layers = 0;
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Trainables: user embeddings U, entity embeddings E (= H_0), relation
// embeddings R, and one d x d weight per layer. Weights act on row vectors:
// out = in * W.
struct ModelParams {
  ModelDims dims;
  Matrix users;
  Matrix entities;
  Matrix relations;
  std::vector<Matrix> weights;

  static ModelParams zeros(const ModelDims& dims);
  // Glorot-uniform with bound sqrt(6 / (rows + cols)) per matrix.
  static ModelParams initialize(const ModelDims& dims, std::uint64_t seed);

  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  static std::vector<std::string> tensor_names(std::size_t layers);

  bool all_finite() const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// exp(u . r), with u . r clamped to [-30, 30].
double relation_score(std::span<const double> u, std::span<const double> r);

// Entities whose hidden rows are needed at each layer to produce the
// targets' final representations. layers[L] holds the targets.
struct ReceptiveField {
  std::vector<std::vector<EntityId>> layers;       // each sorted, unique
  std::vector<std::vector<std::uint32_t>> self_pos;  // [l][row of l+1] -> row in l
  std::vector<std::vector<std::uint32_t>> nbr_pos;   // [l][row * S + s] -> row in l
};

ReceptiveField build_receptive_field(const NeighborIndex& index, std::span<const ItemId> targets,
                                     std::size_t layers);

struct ForwardCache {
  UserId user = 0;
  ItemId item = 0;
  ReceptiveField field;
  std::vector<double> user_vec;             // after dropout
  std::vector<double> user_mask;            // empty when no dropout
  std::vector<double> relation_logit;       // clamped u . r per relation
  std::vector<Matrix> hidden;               // hidden[l], rows follow field.layers[l], post-dropout
  std::vector<Matrix> aggregated;           // aggregated[l]: input to W_l, rows of layer l+1
  std::vector<Matrix> preact;               // preact[l] = aggregated[l] * W_l
  std::vector<Matrix> attention;            // attention[l]: rows of layer l+1, S columns
  std::vector<Matrix> masks;                // masks[l] for hidden[l+1]; empty when no dropout
  double logit = 0.0;
  double prob = 0.5;
};

struct ForwardOptions {
  bool train = false;
  double dropout = 0.0;
  Rng* rng = nullptr;  // required when train && dropout > 0
};

// Prediction for one (user, item) pair; fills `cache` when non-null.
double forward(const ModelParams& params, const NeighborIndex& index, UserId user, ItemId item,
               const ForwardOptions& options = {}, ForwardCache* cache = nullptr);

// Binary cross-entropy with the prediction clamped to [eps, 1 - eps].
double bce_loss(double label, double prob);

// Mean BCE over the batch and its analytic gradient (written to `grads`,
// which is resized/zeroed). Pseudo labels are constants.
double loss_and_grad(const MiniBatch& batch, const ModelParams& params,
                     const NeighborIndex& index, double dropout, Rng& rng, ModelParams& grads,
                     std::size_t workers = 1);

// Mean BCE without gradients; same mask draws as loss_and_grad for equal rng.
double batch_loss(const MiniBatch& batch, const ModelParams& params, const NeighborIndex& index,
                  double dropout, Rng& rng);

// Eval-mode scores. Precomputes the receptive field of `items` once so that
// many users can be scored against the same candidate list.
class ItemScorer {
 public:
  ItemScorer(const ModelParams& params, const NeighborIndex& index, std::vector<ItemId> items);

  std::span<const ItemId> items() const noexcept { return items_; }
  // Writes one probability per item, in the order given at construction.
  void score(UserId user, std::span<double> out) const;
  // Pre-sigmoid logits.
  void score_logits(UserId user, std::span<double> out) const;

 private:
  const ModelParams* params_;
  const NeighborIndex* index_;
  std::vector<ItemId> items_;
  std::vector<std::uint32_t> target_row_;  // items_[k] -> row in field.layers[L]
  ReceptiveField field_;
};

// score_items: probabilities for an arbitrary item list (eval mode).
std::vector<double> score_items(const ModelParams& params, const NeighborIndex& index,
                                UserId user, std::span<const ItemId> items);

struct GradCheckGroup {
  std::string name;
  double relative_error = 0.0;  // ||analytic - numeric|| / (||analytic|| + ||numeric||)
  double max_abs_error = 0.0;
  std::size_t coordinates = 0;
  std::size_t skipped = 0;      // coordinates whose stencil crossed a kink
};

struct GradCheckResult {
  std::vector<GradCheckGroup> groups;
  double max_relative_error = 0.0;
  bool passed = false;
};

struct GradCheckSpec {
  std::uint64_t seed = 0;
  std::size_t dim = 4;
  std::size_t layers = 2;
  std::size_t neighbor_size = 2;
  double step = 1e-4;
  double tolerance = 1e-4;
  double dropout = 0.3;
};

// Analytic vs central finite-difference gradients on a random toy instance.
GradCheckResult gradient_check(const GradCheckSpec& spec);

}  // namespace kgpl

#endif  // KGPL_MODEL_HPP_
