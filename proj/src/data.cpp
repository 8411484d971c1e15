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

#include "kgpl/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <spdlog/spdlog.h>

#include "kgpl/rng.hpp"
#include "kgpl/util.hpp"

namespace kgpl {

bool contains(const ItemSet& set, ItemId item) {
  return std::binary_search(set.begin(), set.end(), item);
}

RawInteractions make_raw(std::vector<Interaction> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  RawInteractions raw;
  for (const auto& [u, i] : pairs) {
    raw.num_users = std::max<std::size_t>(raw.num_users, u + 1);
    raw.num_items = std::max<std::size_t>(raw.num_items, i + 1);
  }
  raw.pairs = std::move(pairs);
  return raw;
}

namespace {

// Yields (user, item, label) for each non-blank line; label defaults to 1.
template <typename Fn>
void read_pair_file(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(path.string(), lineno,
                       "expected 2 or 3 fields, got " + std::to_string(fields.size()));
    }
    std::uint64_t u, i, label = 1;
    if (!parse_u64(fields[0], u) || !parse_u64(fields[1], i) ||
        (fields.size() == 3 && !parse_u64(fields[2], label))) {
      throw ParseError(path.string(), lineno, "non-integer field");
    }
    if (u > UINT32_MAX - 1 || i > UINT32_MAX - 1) {
      throw ParseError(path.string(), lineno, "id out of range");
    }
    fn(static_cast<UserId>(u), static_cast<ItemId>(i), label);
  }
}

}  // namespace

RawInteractions load_interactions(const std::filesystem::path& path) {
  std::vector<Interaction> pairs;
  read_pair_file(path, [&](UserId u, ItemId i, std::uint64_t label) {
    if (label == 1) pairs.emplace_back(u, i);
  });
  return make_raw(std::move(pairs));
}

SplitSizes split_sizes(std::size_t n, const SplitRatios& r) {
  if (r.train < 0 || r.valid < 0 || r.test < 0 ||
      std::abs(r.train + r.valid + r.test - 1.0) > 1e-9) {
    throw UsageError("split ratios must be non-negative and sum to 1");
  }
  const auto n_train = static_cast<std::size_t>(std::llround(r.train * static_cast<double>(n)));
  const auto n_valid = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(r.valid * static_cast<double>(n))));
  return {n_train, n_valid, n - n_train - n_valid};
}

std::size_t InteractionData::num_train() const {
  std::size_t n = 0;
  for (const auto& s : train_pos) n += s.size();
  return n;
}

ItemSet InteractionData::all_positives(UserId u) const {
  ItemSet out;
  out.reserve(train_pos[u].size() + valid_pos[u].size() + test_pos[u].size());
  out.insert(out.end(), train_pos[u].begin(), train_pos[u].end());
  out.insert(out.end(), valid_pos[u].begin(), valid_pos[u].end());
  out.insert(out.end(), test_pos[u].begin(), test_pos[u].end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void InteractionData::recompute_item_freq() {
  item_freq.assign(num_items, 0);
  for (const auto& s : train_pos)
    for (ItemId i : s) ++item_freq[i];
}

InteractionData split_interactions(const RawInteractions& raw, const SplitRatios& ratios,
                                   std::uint64_t seed) {
  const auto sizes = split_sizes(raw.pairs.size(), ratios);

  std::vector<Interaction> shuffled = raw.pairs;
  Rng rng(seed);
  for (std::size_t k = shuffled.size(); k > 1; --k) {
    std::swap(shuffled[k - 1], shuffled[rng.below(k)]);
  }

  InteractionData data;
  data.num_users = raw.num_users;
  data.num_items = raw.num_items;
  data.train_pos.resize(raw.num_users);
  data.valid_pos.resize(raw.num_users);
  data.test_pos.resize(raw.num_users);
  data.valid_neg.resize(raw.num_users);
  data.test_neg.resize(raw.num_users);
  for (std::size_t k = 0; k < shuffled.size(); ++k) {
    const auto [u, i] = shuffled[k];
    auto& dst = k < sizes.train                 ? data.train_pos
                : k < sizes.train + sizes.valid ? data.valid_pos
                                                : data.test_pos;
    dst[u].push_back(i);
  }
  for (auto* split : {&data.train_pos, &data.valid_pos, &data.test_pos})
    for (auto& s : *split) std::sort(s.begin(), s.end());
  data.recompute_item_freq();
  return data;
}

std::size_t generate_eval_negatives(InteractionData& data, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t short_count = 0;
  std::vector<ItemId> pool;

  auto draw = [&](UserId u, const ItemSet& observed, std::size_t wanted, ItemSet& out,
                  const char* split) {
    out.clear();
    if (wanted == 0) return;
    pool.clear();
    for (ItemId i = 0; i < data.num_items; ++i)
      if (!contains(observed, i)) pool.push_back(i);
    if (pool.size() < wanted) {
      spdlog::warn("user {}: only {} unobserved items for {} {} negatives", u, pool.size(),
                   wanted, split);
      ++short_count;
      wanted = pool.size();
    }
    for (std::size_t k = 0; k < wanted; ++k) {
      const std::size_t j = k + rng.below(pool.size() - k);
      std::swap(pool[k], pool[j]);
      out.push_back(pool[k]);
    }
    std::sort(out.begin(), out.end());
  };

  data.valid_neg.assign(data.num_users, {});
  data.test_neg.assign(data.num_users, {});
  for (UserId u = 0; u < data.num_users; ++u) {
    const ItemSet observed = data.all_positives(u);
    draw(u, observed, data.valid_pos[u].size(), data.valid_neg[u], "validation");
    draw(u, observed, data.test_pos[u].size(), data.test_neg[u], "test");
  }
  return short_count;
}

std::vector<ItemSet> load_item_sets(const std::filesystem::path& path, std::size_t num_users,
                                    std::size_t num_items) {
  std::vector<ItemSet> sets(num_users);
  read_pair_file(path, [&](UserId u, ItemId i, std::uint64_t) {
    if (u >= num_users || i >= num_items) {
      throw DataError(path.string() + ": pair (" + std::to_string(u) + ", " +
                      std::to_string(i) + ") outside the dataset vocabulary");
    }
    sets[u].push_back(i);
  });
  for (auto& s : sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return sets;
}

void write_item_sets(const std::filesystem::path& path, const std::vector<ItemSet>& sets,
                     int label) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t u = 0; u < sets.size(); ++u)
    for (ItemId i : sets[u]) out << u << '\t' << i << '\t' << label << '\n';
}

void write_interactions(const std::filesystem::path& path, const RawInteractions& raw) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [u, i] : raw.pairs) out << u << '\t' << i << "\t1\n";
}

}  // namespace kgpl
