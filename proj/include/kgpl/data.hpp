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

#ifndef KGPL_DATA_HPP_
#define KGPL_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "kgpl/types.hpp"

namespace kgpl {

using Interaction = std::pair<UserId, ItemId>;
using ItemSet = std::vector<ItemId>;  // always sorted, unique

bool contains(const ItemSet& set, ItemId item);

// Deduplicated observed pairs, sorted by (user, item).
struct RawInteractions {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<Interaction> pairs;
};

// Canonicalizes arbitrary pairs: sorts, dedups, sizes vocabularies as max+1.
RawInteractions make_raw(std::vector<Interaction> pairs);

// "user item [label]" lines; lines whose label column is not 1 are dropped.
RawInteractions load_interactions(const std::filesystem::path& path);

struct SplitRatios {
  double train = 0.6;
  double valid = 0.2;
  double test = 0.2;
};

// Split sizes after rounding; test takes the remainder.
struct SplitSizes {
  std::size_t train, valid, test;
};
SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios);

struct InteractionData {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<ItemSet> train_pos, valid_pos, test_pos;
  std::vector<ItemSet> valid_neg, test_neg;
  std::vector<std::uint32_t> item_freq;  // train-split observations per item

  std::size_t num_train() const;
  // Positives across all three splits.
  ItemSet all_positives(UserId u) const;
  void recompute_item_freq();
};

// Global random (user, item)-level split; deterministic per seed.
InteractionData split_interactions(const RawInteractions& raw, const SplitRatios& ratios,
                                   std::uint64_t seed);

// One negative per evaluation positive, drawn without replacement from items
// the user never observed in any split. Returns the number of (user, split)
// pairs that ran short of unobserved items.
std::size_t generate_eval_negatives(InteractionData& data, std::uint64_t seed);

// Per-user sets from a "user item [label]" file (label ignored).
std::vector<ItemSet> load_item_sets(const std::filesystem::path& path, std::size_t num_users,
                                    std::size_t num_items);
void write_item_sets(const std::filesystem::path& path, const std::vector<ItemSet>& sets,
                     int label);
void write_interactions(const std::filesystem::path& path, const RawInteractions& raw);

}  // namespace kgpl

#endif  // KGPL_DATA_HPP_
