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

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>
#include <unistd.h>

namespace kgpl::testing {

Planted make_planted(const PlantedSpec& spec) {
  std::mt19937_64 gen(spec.seed);
  Planted p;
  p.item_cluster.resize(spec.items);
  std::vector<std::vector<ItemId>> by_cluster(spec.clusters);
  for (std::size_t i = 0; i < spec.items; ++i) {
    p.item_cluster[i] = i % spec.clusters;
    by_cluster[p.item_cluster[i]].push_back(static_cast<ItemId>(i));
  }
  // Entities: items, then one entity per cluster, then attributes.
  const std::size_t cluster_base = spec.items;
  const std::size_t attr_base = cluster_base + spec.clusters;
  std::vector<Triple> triples;
  std::uniform_int_distribution<std::size_t> pick_attr(0, spec.attributes - 1);
  for (std::size_t i = 0; i < spec.items; ++i) {
    triples.push_back({static_cast<EntityId>(i), 0,
                       static_cast<EntityId>(cluster_base + p.item_cluster[i])});
    // Attributes are cluster-correlated: half the pool belongs to a cluster.
    const std::size_t a = (p.item_cluster[i] * 3 + pick_attr(gen) % 3) % spec.attributes;
    triples.push_back({static_cast<EntityId>(i), 1, static_cast<EntityId>(attr_base + a)});
  }
  p.kg = KnowledgeGraph::from_triples(triples, spec.items, 2);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Interaction> pairs;
  p.user_cluster.resize(spec.users);
  for (std::size_t u = 0; u < spec.users; ++u) {
    p.user_cluster[u] = u % spec.clusters;
    std::set<ItemId> chosen;
    while (chosen.size() < spec.per_user) {
      const bool inside = unit(gen) < spec.in_cluster;
      std::size_t c = p.user_cluster[u];
      if (!inside) c = (c + 1 + gen() % (spec.clusters - 1)) % spec.clusters;
      const auto& pool = by_cluster[c];
      // Mild popularity skew inside a cluster.
      const double r = unit(gen);
      const std::size_t idx = static_cast<std::size_t>(r * r * static_cast<double>(pool.size()));
      chosen.insert(pool[std::min(idx, pool.size() - 1)]);
    }
    for (ItemId i : chosen) pairs.emplace_back(static_cast<UserId>(u), i);
  }
  p.raw = make_raw(std::move(pairs));
  p.raw.num_items = spec.items;
  return p;
}

ToyGraph random_toy_graph(std::uint64_t seed, std::size_t max_nodes) {
  std::mt19937_64 gen(seed);
  const std::size_t n = 3 + gen() % (max_nodes - 2);
  const std::size_t items = 1 + gen() % n;
  const std::size_t relations = 1 + gen() % 3;
  const std::size_t edges = gen() % (2 * n + 1);
  std::vector<Triple> triples;
  for (std::size_t k = 0; k < edges; ++k) {
    const auto h = static_cast<EntityId>(gen() % n);
    const auto t = static_cast<EntityId>(gen() % n);
    triples.push_back({h, static_cast<RelationId>(gen() % relations), t});
  }
  ToyGraph g;
  g.kg = KnowledgeGraph::from_triples(triples, n, relations);
  g.num_items = items;
  return g;
}

std::vector<double> brute_force_walks(const std::vector<Triple>& triples, std::size_t num_entities,
                                      const std::vector<EntityId>& sources, unsigned h) {
  std::set<std::tuple<EntityId, EntityId, RelationId>> edges;
  for (const auto& t : triples) {
    edges.insert({t.head, t.tail, t.relation});
    edges.insert({t.tail, t.head, t.relation});
  }
  std::vector<std::vector<EntityId>> adj(num_entities);
  for (const auto& [a, b, r] : edges) adj[a].push_back(b);

  std::vector<double> counts(num_entities, 0.0);
  std::function<void(EntityId, unsigned)> walk = [&](EntityId at, unsigned depth) {
    if (depth > 0) counts[at] += 1.0;
    if (depth == h) return;
    for (EntityId next : adj[at]) walk(next, depth + 1);
  };
  for (EntityId s : sources) walk(s, 0);
  return counts;
}

namespace {

std::vector<double> hidden(const ModelParams& p, const NeighborIndex& index,
                           const std::vector<double>& u, EntityId e, std::size_t layer) {
  const std::size_t d = p.dims.dim;
  if (layer == 0) {
    std::vector<double> row(d);
    for (std::size_t k = 0; k < d; ++k) row[k] = p.entities(e, k);
    return row;
  }
  const auto self = hidden(p, index, u, e, layer - 1);
  const auto nbrs = index.row(e);
  std::vector<double> scores;
  double total = 0.0;
  for (const auto& n : nbrs) {
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += u[k] * p.relations(n.relation, k);
    dot = std::clamp(dot, -30.0, 30.0);
    scores.push_back(std::exp(dot));
    total += scores.back();
  }
  std::vector<double> agg = self;
  for (std::size_t s = 0; s < nbrs.size(); ++s) {
    const auto h = hidden(p, index, u, nbrs[s].entity, layer - 1);
    for (std::size_t k = 0; k < d; ++k) agg[k] += scores[s] / total * h[k];
  }
  const Matrix& w = p.weights[layer - 1];
  std::vector<double> out(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double z = 0.0;
    for (std::size_t k = 0; k < d; ++k) z += agg[k] * w(k, j);
    if (layer == p.dims.layers) out[j] = std::tanh(z);
    else out[j] = z > 0.0 ? z : 0.2 * z;
  }
  return out;
}

}  // namespace

double reference_logit(const ModelParams& params, const NeighborIndex& index, UserId user,
                       ItemId item) {
  const std::size_t d = params.dims.dim;
  std::vector<double> u(d);
  for (std::size_t k = 0; k < d; ++k) u[k] = params.users(user, k);
  const auto h = hidden(params, index, u, item, params.dims.layers);
  double logit = 0.0;
  for (std::size_t k = 0; k < d; ++k) logit += u[k] * h[k];
  return logit;
}

double reference_predict(const ModelParams& params, const NeighborIndex& index, UserId user,
                         ItemId item) {
  return 1.0 / (1.0 + std::exp(-reference_logit(params, index, user, item)));
}

bool chi_squared_ok(const std::vector<std::size_t>& observed, const std::vector<double>& probs,
                    double alpha, double* statistic) {
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);
  double stat = 0.0;
  std::size_t bins = 0;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double e = probs[k] * n;
    if (e < 5.0) {
      pooled_obs += static_cast<double>(observed[k]);
      pooled_exp += e;
      continue;
    }
    const double diff = static_cast<double>(observed[k]) - e;
    stat += diff * diff / e;
    ++bins;
  }
  if (pooled_exp > 0.0) {
    const double diff = pooled_obs - pooled_exp;
    stat += diff * diff / pooled_exp;
    ++bins;
  }
  if (statistic) *statistic = stat;
  if (bins < 2) return true;
  const boost::math::chi_squared dist(static_cast<double>(bins - 1));
  return stat <= boost::math::quantile(dist, 1.0 - alpha);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("kgpl_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace kgpl::testing
