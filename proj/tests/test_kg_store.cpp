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

#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kgpl/kg_store.hpp"

namespace kgpl {
namespace {

std::filesystem::path write_text(const std::string& name, const std::string& text) {
  const auto dir = testing::scratch_dir("kg_" + name);
  const auto path = dir / "kg.txt";
  std::ofstream(path) << text;
  return path;
}

TEST(LoadKg, SingleTripleIsSymmetric) {
  const auto kg = load_kg(write_text("single", "0 0 1\n"));
  EXPECT_EQ(kg.num_entities(), 2u);
  EXPECT_EQ(kg.num_relations(), 1u);
  ASSERT_EQ(kg.degree(0), 1u);
  ASSERT_EQ(kg.degree(1), 1u);
  EXPECT_EQ(kg.neighbors(0)[0], (Neighbor{1, 0}));
  EXPECT_EQ(kg.neighbors(1)[0], (Neighbor{0, 0}));
}

TEST(LoadKg, DuplicateLinesCollapse) {
  const auto a = load_kg(write_text("dup_a", "0 0 1\n"));
  const auto b = load_kg(write_text("dup_b", "0 0 1\n0\t0\t1\n"));
  EXPECT_EQ(a.triples(), b.triples());
  EXPECT_EQ(a.num_adjacency_entries(), b.num_adjacency_entries());
  EXPECT_EQ(b.triples().size(), 1u);
}

TEST(LoadKg, MalformedLineReportsLineNumber) {
  try {
    load_kg(write_text("bad", "0 0 1\n1 2\n"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_kg(write_text("nonint", "0 x 1\n")), ParseError);
  EXPECT_THROW(load_kg(write_text("neg", "0 -1 1\n")), ParseError);
}

TEST(LoadKg, EmptyFileIsAnError) {
  EXPECT_THROW(load_kg(write_text("empty", "")), DataError);
  EXPECT_THROW(load_kg("/nonexistent/kg.txt"), DataError);
}

TEST(KnowledgeGraph, AdjacencyMatchesTriplesBothWays) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto toy = testing::random_toy_graph(seed);
    const auto& kg = toy.kg;
    std::set<std::tuple<EntityId, EntityId, RelationId>> expected;
    for (const auto& t : kg.triples()) {
      expected.insert({t.head, t.tail, t.relation});
      expected.insert({t.tail, t.head, t.relation});
    }
    std::size_t total = 0;
    for (EntityId e = 0; e < kg.num_entities(); ++e) {
      for (const auto& n : kg.neighbors(e)) {
        EXPECT_TRUE(expected.count({e, n.entity, n.relation})) << "seed " << seed;
        ++total;
      }
    }
    EXPECT_EQ(total, expected.size());
  }
}

TEST(KnowledgeGraph, MinimumSizesCoverItemsOutsideGraph) {
  const auto kg = KnowledgeGraph::from_triples({{0, 0, 1}}, 5, 3);
  EXPECT_EQ(kg.num_entities(), 5u);
  EXPECT_EQ(kg.num_relations(), 3u);
  EXPECT_EQ(kg.self_relation(), 3u);
  EXPECT_EQ(kg.degree(4), 0u);
}

KnowledgeGraph star(std::size_t leaves) {
  std::vector<Triple> t;
  for (std::size_t k = 1; k <= leaves; ++k) t.push_back({0, 0, static_cast<EntityId>(k)});
  return KnowledgeGraph::from_triples(t);
}

TEST(NeighborIndex, PadsWithReplacementBelowS) {
  const auto kg = star(5);
  const auto idx = build_neighbor_index(kg, 8, 11);
  const auto row = idx.row(0);
  ASSERT_EQ(row.size(), 8u);
  std::set<EntityId> seen;
  for (const auto& n : row) {
    EXPECT_GE(n.entity, 1u);
    EXPECT_LE(n.entity, 5u);
    seen.insert(n.entity);
  }
  EXPECT_EQ(seen.size(), 5u);  // every true neighbour kept
}

TEST(NeighborIndex, SamplesDistinctAboveS) {
  const auto kg = star(40);
  const auto idx = build_neighbor_index(kg, 32, 3);
  std::set<EntityId> seen;
  for (const auto& n : idx.row(0)) seen.insert(n.entity);
  EXPECT_EQ(seen.size(), 32u);
}

TEST(NeighborIndex, IsolatedEntityGetsSelfPairs) {
  const auto kg = KnowledgeGraph::from_triples({{0, 0, 1}}, 3, 1);
  const auto idx = build_neighbor_index(kg, 4, 0);
  for (const auto& n : idx.row(2)) EXPECT_EQ(n, (Neighbor{2, kg.self_relation()}));
}

TEST(NeighborIndex, DeterministicPerSeed) {
  const auto toy = testing::random_toy_graph(99);
  const auto a = build_neighbor_index(toy.kg, 4, 5);
  const auto b = build_neighbor_index(toy.kg, 4, 5);
  EXPECT_EQ(a, b);
  // Rows of entities whose degree equals S do not depend on the seed.
  const auto c = build_neighbor_index(toy.kg, 4, 6);
  for (EntityId e = 0; e < toy.kg.num_entities(); ++e) {
    if (toy.kg.degree(e) != 4) continue;
    EXPECT_TRUE(std::equal(a.row(e).begin(), a.row(e).end(), c.row(e).begin()));
  }
}

TEST(NeighborIndex, RejectsZeroSize) {
  EXPECT_THROW(build_neighbor_index(star(2), 0, 0), UsageError);
}

}  // namespace
}  // namespace kgpl
