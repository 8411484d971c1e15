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

#ifndef KGPL_TESTS_SUPPORT_FIXTURES_HPP_
#define KGPL_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kgpl/data.hpp"
#include "kgpl/eval.hpp"
#include "kgpl/kg_store.hpp"
#include "kgpl/model.hpp"

namespace kgpl::testing {

// Clustered users and items with a KG that exposes the clusters: item ->
// cluster entity (relation 0), item -> shared attribute entities
// (relation 1). Users mostly pick items from their own cluster.
struct PlantedSpec {
  std::size_t users = 120;
  std::size_t items = 80;
  std::size_t clusters = 4;
  std::size_t per_user = 8;
  double in_cluster = 0.9;
  std::size_t attributes = 12;
  std::uint64_t seed = 7;
};

struct Planted {
  RawInteractions raw;
  KnowledgeGraph kg;
  std::vector<std::size_t> user_cluster;
  std::vector<std::size_t> item_cluster;
};

Planted make_planted(const PlantedSpec& spec);

// Random graph with up to `max_nodes` entities (items form a prefix).
struct ToyGraph {
  KnowledgeGraph kg;
  std::size_t num_items = 0;
};
ToyGraph random_toy_graph(std::uint64_t seed, std::size_t max_nodes = 20);

// Brute-force DFS over every walk of length 1..h from each source; counts the
// walks ending at each entity. Builds its own adjacency from the triples.
std::vector<double> brute_force_walks(const std::vector<Triple>& triples, std::size_t num_entities,
                                      const std::vector<EntityId>& sources, unsigned h);

// Straight-line recursive evaluation of the eval-mode prediction.
double reference_predict(const ModelParams& params, const NeighborIndex& index, UserId user,
                         ItemId item);
double reference_logit(const ModelParams& params, const NeighborIndex& index, UserId user,
                       ItemId item);

// Chi-squared goodness of fit: true when the statistic stays below the
// 1 - alpha quantile. Bins with expected count < 5 are pooled.
bool chi_squared_ok(const std::vector<std::size_t>& observed, const std::vector<double>& probs,
                    double alpha, double* statistic = nullptr);

// Fresh scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);

}  // namespace kgpl::testing

#endif  // KGPL_TESTS_SUPPORT_FIXTURES_HPP_
