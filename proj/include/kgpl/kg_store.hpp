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

#ifndef KGPL_KG_STORE_HPP_
#define KGPL_KG_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "kgpl/types.hpp"

namespace kgpl {

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct Neighbor {
  EntityId entity;
  RelationId relation;
  friend auto operator<=>(const Neighbor&, const Neighbor&) = default;
};

// Knowledge graph with undirected, deduplicated CSR adjacency. Items occupy
// the entity-id prefix [0, num_items).
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Builds from triples. Vocabulary sizes are at least max-id + 1; callers
  // may request larger sizes (e.g. to cover items absent from the graph).
  static KnowledgeGraph from_triples(std::vector<Triple> triples,
                                     std::size_t min_entities = 0,
                                     std::size_t min_relations = 0);

  std::size_t num_entities() const noexcept { return num_entities_; }
  std::size_t num_relations() const noexcept { return num_relations_; }
  // Id reserved for padding isolated entities in a NeighborIndex.
  RelationId self_relation() const noexcept {
    return static_cast<RelationId>(num_relations_);
  }

  const std::vector<Triple>& triples() const noexcept { return triples_; }

  std::span<const Neighbor> neighbors(EntityId e) const noexcept {
    return {adjacency_.data() + offsets_[e], offsets_[e + 1] - offsets_[e]};
  }
  std::size_t degree(EntityId e) const noexcept { return offsets_[e + 1] - offsets_[e]; }
  std::size_t num_adjacency_entries() const noexcept { return adjacency_.size(); }

 private:
  std::size_t num_entities_ = 0;
  std::size_t num_relations_ = 0;
  std::vector<Triple> triples_;  // sorted, unique
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;  // per entity sorted, unique
};

// Reads "head relation tail" lines (tabs or spaces). Duplicate lines collapse.
KnowledgeGraph load_kg(const std::filesystem::path& path);

// Fixed-size sampled neighbourhood per entity.
class NeighborIndex {
 public:
  NeighborIndex() = default;
  NeighborIndex(std::size_t num_entities, std::size_t neighbor_size, std::uint64_t seed)
      : neighbor_size_(neighbor_size), seed_(seed), slots_(num_entities * neighbor_size) {}

  std::size_t neighbor_size() const noexcept { return neighbor_size_; }
  std::size_t num_entities() const noexcept {
    return neighbor_size_ == 0 ? 0 : slots_.size() / neighbor_size_;
  }
  std::uint64_t seed() const noexcept { return seed_; }

  std::span<const Neighbor> row(EntityId e) const noexcept {
    return {slots_.data() + e * neighbor_size_, neighbor_size_};
  }
  std::span<Neighbor> mutable_row(EntityId e) noexcept {
    return {slots_.data() + e * neighbor_size_, neighbor_size_};
  }

  friend bool operator==(const NeighborIndex&, const NeighborIndex&) = default;

 private:
  std::size_t neighbor_size_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Neighbor> slots_;
};

// Entities with >= S neighbours get S distinct ones (without replacement);
// fewer get every neighbour plus with-replacement padding; isolated entities
// get S copies of (self, self_relation). Deterministic in (kg, S, seed).
NeighborIndex build_neighbor_index(const KnowledgeGraph& kg, std::size_t neighbor_size,
                                   std::uint64_t seed);

}  // namespace kgpl

#endif  // KGPL_KG_STORE_HPP_
