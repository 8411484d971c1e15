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

#ifndef KGPL_EVAL_HPP_
#define KGPL_EVAL_HPP_

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kgpl/data.hpp"
#include "kgpl/model.hpp"

namespace kgpl {

struct RankedList {
  UserId user = 0;
  std::vector<ItemId> items;  // descending score, ties by ascending id
  std::size_t k = 0;
};

// Top-`k` of `candidates` (length min(k, |candidates|)).
RankedList rank_top_k(UserId user, std::span<const ItemId> candidates,
                      std::span<const double> scores, std::size_t k);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t hits = 0;
};

// Uses the first min(k, |ranked|) entries; P = hits / k, R = hits / |relevant|.
PrecisionRecall precision_recall_at_k(const RankedList& ranked, const ItemSet& relevant,
                                      std::size_t k);

// A recommender under evaluation: writes one score per catalog item.
struct System {
  std::string name;
  std::function<void(UserId, std::span<double>)> score_all;
};

// Non-personalized popularity: train count + validation count.
System top_popular(const InteractionData& data, std::string name = "TopPopular");
std::vector<double> top_popular_scores(const InteractionData& data);

// Eval-mode model scores over the whole catalog. `params` and `index` must
// outlive the returned System.
System model_system(std::string name, const ModelParams& params, const NeighborIndex& index,
                    std::size_t num_items);

enum class Split { kValid, kTest };
enum class CandidateSet { kFull, kSampled };

const char* split_name(Split split);
Split parse_split(const std::string& s);
CandidateSet parse_candidate_set(const std::string& s);

struct EvalOptions {
  Split split = Split::kTest;
  CandidateSet candidates = CandidateSet::kFull;
  std::vector<std::size_t> ks{10, 20, 50, 100};
  std::size_t workers = 1;
  // Also rank users without relevant items, keeping every top-max(K) list.
  bool keep_lists = false;
};

struct UserMetrics {
  UserId user = 0;
  std::size_t train_count = 0;
  std::size_t relevant = 0;
  std::vector<double> precision;  // per K
  std::vector<double> recall;
  std::vector<std::size_t> hits;
};

struct EvalReport {
  std::string system;
  std::vector<std::size_t> ks;
  std::vector<double> mean_precision;
  std::vector<double> mean_recall;
  std::vector<UserMetrics> per_user;  // users with >= 1 relevant item, ascending id
  std::vector<RankedList> lists;      // when keep_lists, every user with candidates

  double recall_at(std::size_t k) const;
  double precision_at(std::size_t k) const;
};

EvalReport evaluate(const System& system, const InteractionData& data, const EvalOptions& options);

// "system,K,metric,value" rows (metric in {precision, recall}).
void write_metrics_csv(const std::filesystem::path& path, const std::vector<EvalReport>& reports);

}  // namespace kgpl

#endif  // KGPL_EVAL_HPP_
