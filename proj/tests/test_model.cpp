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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kgpl/checkpoint.hpp"
#include "kgpl/eval.hpp"
#include "kgpl/model.hpp"
#include "kgpl/optimizer.hpp"

namespace kgpl {
namespace {

struct Instance {
  KnowledgeGraph kg;
  NeighborIndex index;
  ModelParams params;
  std::size_t num_items = 0;
};

Instance make_instance(std::uint64_t seed, std::size_t dim, std::size_t layers, std::size_t s,
                       std::size_t users = 5) {
  auto toy = testing::random_toy_graph(seed, 20);
  Instance in;
  in.kg = std::move(toy.kg);
  in.num_items = toy.num_items;
  in.index = build_neighbor_index(in.kg, s, seed);
  const ModelDims dims{users, in.kg.num_entities(), in.kg.num_relations() + 1, dim, layers};
  in.params = ModelParams::initialize(dims, seed + 100);
  return in;
}

TEST(RelationScore, Examples) {
  const std::vector<double> zero(3, 0.0), r{0.3, -2.0, 5.0};
  EXPECT_DOUBLE_EQ(relation_score(zero, r), 1.0);
  const std::vector<double> u{std::log(2.0)}, one{1.0};
  EXPECT_NEAR(relation_score(u, one), 2.0, 1e-15);
  const std::vector<double> e1{1.0, 0.0};
  EXPECT_NEAR(relation_score(e1, e1), std::exp(1.0), 1e-15);
  const std::vector<double> big{100.0};
  EXPECT_DOUBLE_EQ(relation_score(big, one), std::exp(30.0));
}

TEST(Forward, MatchesStraightLineOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto in = make_instance(seed, 4, 2, 2);
    for (UserId u = 0; u < 5; ++u) {
      for (ItemId i = 0; i < in.num_items; ++i) {
        const double got = forward(in.params, in.index, u, i);
        const double want = testing::reference_predict(in.params, in.index, u, i);
        EXPECT_NEAR(got, want, 1e-12) << "seed " << seed;
      }
    }
  }
}

TEST(Forward, ThreeLayerOracle) {
  const auto in = make_instance(5, 3, 3, 3);
  for (ItemId i = 0; i < in.num_items; ++i)
    EXPECT_NEAR(forward(in.params, in.index, 1, i),
                testing::reference_predict(in.params, in.index, 1, i), 1e-12);
}

TEST(Forward, ZeroWeightsGiveHalf) {
  auto in = make_instance(3, 4, 1, 2);
  in.params.weights[0].fill(0.0);
  for (UserId u = 0; u < 5; ++u)
    for (ItemId i = 0; i < in.num_items; ++i)
      EXPECT_EQ(forward(in.params, in.index, u, i), 0.5);
}

TEST(Forward, AttentionRowsSumToOneAndZeroUserIsUniform) {
  auto in = make_instance(8, 4, 2, 4);
  ForwardCache cache;
  forward(in.params, in.index, 2, 0, {}, &cache);
  for (const auto& att : cache.attention) {
    for (std::size_t r = 0; r < att.rows(); ++r) {
      double sum = 0.0;
      for (double p : att.row(r)) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
  for (std::size_t k = 0; k < in.params.dims.dim; ++k) in.params.users(2, k) = 0.0;
  forward(in.params, in.index, 2, 0, {}, &cache);
  for (const auto& att : cache.attention)
    for (std::size_t r = 0; r < att.rows(); ++r)
      for (double p : att.row(r)) EXPECT_DOUBLE_EQ(p, 1.0 / 4.0);
}

TEST(Forward, OutputInOpenUnitInterval) {
  auto in = make_instance(9, 8, 2, 2);
  for (Matrix* m : in.params.tensors())
    for (double& v : m->flat()) v *= 50.0;
  for (ItemId i = 0; i < in.num_items; ++i) {
    const double p = forward(in.params, in.index, 0, i);
    EXPECT_TRUE(std::isfinite(p));
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(Loss, EntropyAtHalfAndClamp) {
  EXPECT_NEAR(bce_loss(0.5, 0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(bce_loss(1.0, 1.0 - kProbEpsilon), kProbEpsilon, 1e-12);
  EXPECT_TRUE(std::isfinite(bce_loss(1.0, 0.0)));
  EXPECT_NEAR(bce_loss(1.0, 0.0), -std::log(kProbEpsilon), 1e-9);
}

TEST(Loss, SingleRowAtHalfIsLn2) {
  auto in = make_instance(3, 4, 1, 2);
  in.params.weights[0].fill(0.0);
  MiniBatch b;
  b.rows.push_back({0, 0, 0.5, RowKind::kPseudo, 1});
  Rng rng(0);
  ModelParams grads;
  EXPECT_NEAR(loss_and_grad(b, in.params, in.index, 0.0, rng, grads), std::log(2.0), 1e-15);
}

TEST(GradientCheck, AllGroupsAcrossSeedsAndShapes) {
  for (std::size_t dim : {4, 8})
    for (std::size_t layers : {1, 2})
      for (std::size_t s : {2, 4})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
          GradCheckSpec spec;
          spec.seed = seed;
          spec.dim = dim;
          spec.layers = layers;
          spec.neighbor_size = s;
          const auto r = gradient_check(spec);
          EXPECT_TRUE(r.passed) << "seed " << seed << " d " << dim << " L " << layers << " S " << s
                                << " err " << r.max_relative_error;
          ASSERT_EQ(r.groups.size(), 3 + layers);
          for (const auto& g : r.groups) {
            EXPECT_LT(g.relative_error, 1e-4) << g.name;
            EXPECT_GT(g.coordinates, 0u) << g.name;
          }
        }
}

TEST(LossAndGrad, WorkersDoNotChangeResult) {
  const auto in = make_instance(11, 4, 2, 2);
  MiniBatch b;
  for (UserId u = 0; u < 5; ++u)
    for (ItemId i = 0; i < in.num_items; ++i)
      b.rows.push_back({u, i, (u + i) % 2 ? 1.0 : 0.3, RowKind::kPseudo, 0});
  Rng r1(4), r2(4);
  ModelParams g1, g2;
  const double l1 = loss_and_grad(b, in.params, in.index, 0.2, r1, g1, 1);
  const double l2 = loss_and_grad(b, in.params, in.index, 0.2, r2, g2, 3);
  EXPECT_NEAR(l1, l2, 1e-12);
  const auto t1 = g1.tensors();
  const auto t2 = g2.tensors();
  for (std::size_t k = 0; k < t1.size(); ++k)
    for (std::size_t j = 0; j < t1[k]->flat().size(); ++j)
      EXPECT_NEAR(t1[k]->flat()[j], t2[k]->flat()[j], 1e-12);
  Rng r3(4);
  EXPECT_EQ(batch_loss(b, in.params, in.index, 0.2, r3), l1);
}

// With one layer, zero relation embeddings and W = I, the logit is a product
// of independently masked vectors, so its expectation over masks equals the
// eval-mode logit.
TEST(Dropout, InvertedScalingPreservesExpectedLogit) {
  auto in = make_instance(12, 4, 1, 2);
  in.params.relations.fill(0.0);
  in.params.weights[0].fill(0.0);
  for (std::size_t k = 0; k < 4; ++k) in.params.weights[0](k, k) = 1.0;
  const UserId u = 1;
  const ItemId item = 0;
  ForwardCache eval_cache;
  forward(in.params, in.index, u, item, {}, &eval_cache);
  Rng rng(77);
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < n; ++k) {
    ForwardCache c;
    forward(in.params, in.index, u, item, {true, 0.3, &rng}, &c);
    sum += c.logit;
    sq += c.logit * c.logit;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
  EXPECT_NEAR(mean, eval_cache.logit, 3.0 * sd / std::sqrt(static_cast<double>(n)) + 1e-12);
}

TEST(ScoreItems, BatchEqualsSingleBitwise) {
  const auto in = make_instance(13, 8, 2, 4);
  std::vector<ItemId> items(in.num_items);
  std::iota(items.begin(), items.end(), 0);
  for (UserId u = 0; u < 5; ++u) {
    const auto scores = score_items(in.params, in.index, u, items);
    for (ItemId i = 0; i < in.num_items; ++i) EXPECT_EQ(scores[i], forward(in.params, in.index, u, i));
    const auto single = score_items(in.params, in.index, u, std::vector<ItemId>{items.back()});
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0], scores.back());
  }
  std::vector<ItemId> rev(items.rbegin(), items.rend());
  const auto a = score_items(in.params, in.index, 0, items);
  const auto b = score_items(in.params, in.index, 0, rev);
  for (std::size_t k = 0; k < items.size(); ++k) EXPECT_EQ(b[k], a[items.size() - 1 - k]);
  EXPECT_TRUE(score_items(in.params, in.index, 0, std::vector<ItemId>{}).empty());
}

TEST(ScoreItems, LogitRankingMatchesProbabilityRanking) {
  const auto in = make_instance(14, 4, 2, 2);
  std::vector<ItemId> items(in.num_items);
  std::iota(items.begin(), items.end(), 0);
  const ItemScorer scorer(in.params, in.index, items);
  std::vector<double> p(items.size()), z(items.size());
  for (UserId u = 0; u < 5; ++u) {
    scorer.score(u, p);
    scorer.score_logits(u, z);
    EXPECT_EQ(rank_top_k(u, items, p, 5).items, rank_top_k(u, items, z, 5).items);
  }
}

TEST(Params, InitializationIsSeededAndBounded) {
  const ModelDims dims{3, 10, 4, 6, 2};
  const auto a = ModelParams::initialize(dims, 1);
  EXPECT_EQ(a, ModelParams::initialize(dims, 1));
  EXPECT_FALSE(a == ModelParams::initialize(dims, 2));
  const double bound = std::sqrt(6.0 / (10 + 6));
  for (double v : a.entities.flat()) EXPECT_LE(std::abs(v), bound);
  EXPECT_TRUE(a.all_finite());
}

TEST(Adam, ZeroGradientLeavesParamsAndAdvancesStep) {
  const ModelDims dims{2, 3, 2, 2, 1};
  auto p = ModelParams::initialize(dims, 0);
  const auto before = p;
  AdamState st = AdamState::zeros(dims);
  adam_step(p, ModelParams::zeros(dims), st, 0.01);
  EXPECT_EQ(p, before);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adam, FirstStepClosedForm) {
  const ModelDims dims{1, 1, 1, 1, 1};
  auto p = ModelParams::zeros(dims);
  auto g = ModelParams::zeros(dims);
  g.users(0, 0) = 0.3;
  g.entities(0, 0) = -2.0;
  AdamState st;
  adam_step(p, g, st, 0.1);
  EXPECT_NEAR(p.users(0, 0), -0.1 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(p.entities(0, 0), 0.1 * 2.0 / (2.0 + 1e-8), 1e-15);
}

TEST(Adam, ConstantGradientStepTendsToLr) {
  const ModelDims dims{1, 1, 1, 1, 1};
  auto p = ModelParams::zeros(dims);
  auto g = ModelParams::zeros(dims);
  g.users(0, 0) = 0.7;
  AdamState st;
  double prev = 0.0, delta = 0.0;
  for (int k = 0; k < 500; ++k) {
    adam_step(p, g, st, 0.01);
    delta = prev - p.users(0, 0);
    prev = p.users(0, 0);
  }
  EXPECT_NEAR(delta, 0.01, 1e-6);
}

TEST(Checkpoint, RoundTripAtFloatPrecision) {
  const auto dir = testing::scratch_dir("ckpt");
  const ModelDims dims{3, 7, 3, 4, 2};
  auto p = ModelParams::initialize(dims, 5);
  AdamState st = AdamState::zeros(dims);
  adam_step(p, ModelParams::initialize(dims, 6), st, 0.01);
  save_checkpoint(dir / "m.ckpt", p, st);
  const auto ck = load_checkpoint(dir / "m.ckpt", dims);
  EXPECT_EQ(ck.params.dims, dims);
  EXPECT_EQ(ck.optimizer.step, 1u);
  const auto a = p.tensors();
  const auto b = ck.params.tensors();
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t j = 0; j < a[k]->flat().size(); ++j)
      EXPECT_EQ(static_cast<float>(a[k]->flat()[j]), b[k]->flat()[j]);
  ModelDims other = dims;
  other.dim = 5;
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt", other), DataError);
}

TEST(Checkpoint, RejectsBadMagicAndTruncation) {
  const auto dir = testing::scratch_dir("ckpt_bad");
  std::ofstream(dir / "bad.ckpt") << "NOPE1xxxxxxxxxxxxxxxxxxxxxxxxxx";
  EXPECT_THROW(load_checkpoint(dir / "bad.ckpt"), DataError);
  const ModelDims dims{2, 3, 2, 2, 1};
  save_checkpoint(dir / "ok.ckpt", ModelParams::zeros(dims), AdamState::zeros(dims));
  const auto full = testing::read_file(dir / "ok.ckpt");
  std::ofstream(dir / "trunc.ckpt", std::ios::binary) << full.substr(0, full.size() - 3);
  EXPECT_THROW(load_checkpoint(dir / "trunc.ckpt"), DataError);
}

}  // namespace
}  // namespace kgpl
