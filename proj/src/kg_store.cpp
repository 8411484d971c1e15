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

#include "kgpl/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>

#include "kgpl/rng.hpp"
#include "kgpl/util.hpp"

namespace kgpl {

KnowledgeGraph KnowledgeGraph::from_triples(std::vector<Triple> triples,
                                            std::size_t min_entities,
                                            std::size_t min_relations) {
  KnowledgeGraph kg;
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());

  std::size_t num_entities = min_entities;
  std::size_t num_relations = min_relations;
  for (const auto& t : triples) {
    num_entities = std::max<std::size_t>(num_entities, std::max(t.head, t.tail) + 1);
    num_relations = std::max<std::size_t>(num_relations, t.relation + 1);
  }

  std::vector<std::pair<EntityId, Neighbor>> edges;
  edges.reserve(2 * triples.size());
  for (const auto& t : triples) {
    edges.push_back({t.head, {t.tail, t.relation}});
    edges.push_back({t.tail, {t.head, t.relation}});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  kg.num_entities_ = num_entities;
  kg.num_relations_ = num_relations;
  kg.offsets_.assign(num_entities + 1, 0);
  for (const auto& [src, nb] : edges) ++kg.offsets_[src + 1];
  std::partial_sum(kg.offsets_.begin(), kg.offsets_.end(), kg.offsets_.begin());
  kg.adjacency_.reserve(edges.size());
  for (const auto& [src, nb] : edges) kg.adjacency_.push_back(nb);
  kg.triples_ = std::move(triples);
  return kg;
}

KnowledgeGraph load_kg(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open KG file " + path.string());

  std::vector<Triple> triples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw ParseError(path.string(), lineno,
                       "expected 3 fields (head relation tail), got " +
                           std::to_string(fields.size()));
    }
    std::uint64_t h, r, t;
    if (!parse_u64(fields[0], h) || !parse_u64(fields[1], r) || !parse_u64(fields[2], t)) {
      throw ParseError(path.string(), lineno, "non-integer field");
    }
    if (h > UINT32_MAX - 1 || r > UINT32_MAX - 1 || t > UINT32_MAX - 1) {
      throw ParseError(path.string(), lineno, "id out of range");
    }
    triples.push_back({static_cast<EntityId>(h), static_cast<RelationId>(r),
                       static_cast<EntityId>(t)});
  }
  if (triples.empty()) throw DataError("KG file " + path.string() + " has no triples");
  return KnowledgeGraph::from_triples(std::move(triples));
}

NeighborIndex build_neighbor_index(const KnowledgeGraph& kg, std::size_t neighbor_size,
                                   std::uint64_t seed) {
  if (neighbor_size == 0) throw UsageError("neighbor_size must be >= 1");
  NeighborIndex index(kg.num_entities(), neighbor_size, seed);
  Rng rng(seed);
  std::vector<std::size_t> perm;

  for (EntityId e = 0; e < kg.num_entities(); ++e) {
    auto row = index.mutable_row(e);
    const auto adj = kg.neighbors(e);
    const std::size_t deg = adj.size();

    if (deg == 0) {
      std::fill(row.begin(), row.end(), Neighbor{e, kg.self_relation()});
    } else if (deg >= neighbor_size) {
      if (deg == neighbor_size) {
        std::copy(adj.begin(), adj.end(), row.begin());
        continue;
      }
      // Partial Fisher-Yates, then restore adjacency order.
      perm.resize(deg);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t k = 0; k < neighbor_size; ++k) {
        const std::size_t j = k + rng.below(deg - k);
        std::swap(perm[k], perm[j]);
      }
      std::sort(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(neighbor_size));
      for (std::size_t k = 0; k < neighbor_size; ++k) row[k] = adj[perm[k]];
    } else {
      std::copy(adj.begin(), adj.end(), row.begin());
      for (std::size_t k = deg; k < neighbor_size; ++k) row[k] = adj[rng.below(deg)];
    }
  }
  return index;
}

}  // namespace kgpl
