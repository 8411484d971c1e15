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

#include "kgpl/eval.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <thread>

#include "kgpl/util.hpp"

namespace kgpl {

RankedList rank_top_k(UserId user, std::span<const ItemId> candidates,
                      std::span<const double> scores, std::size_t k) {
  std::vector<std::uint32_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n = std::min(k, order.size());
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return candidates[a] < candidates[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    better);
  RankedList list;
  list.user = user;
  list.k = k;
  list.items.reserve(n);
  for (std::size_t r = 0; r < n; ++r) list.items.push_back(candidates[order[r]]);
  return list;
}

PrecisionRecall precision_recall_at_k(const RankedList& ranked, const ItemSet& relevant,
                                      std::size_t k) {
  PrecisionRecall pr;
  if (k == 0) throw UsageError("K must be >= 1");
  const std::size_t n = std::min(k, ranked.items.size());
  for (std::size_t r = 0; r < n; ++r)
    if (contains(relevant, ranked.items[r])) ++pr.hits;
  pr.precision = static_cast<double>(pr.hits) / static_cast<double>(k);
  pr.recall = relevant.empty() ? 0.0
                               : static_cast<double>(pr.hits) / static_cast<double>(relevant.size());
  return pr;
}

std::vector<double> top_popular_scores(const InteractionData& data) {
  std::vector<double> counts(data.num_items, 0.0);
  for (UserId u = 0; u < data.num_users; ++u) {
    for (ItemId i : data.train_pos[u]) counts[i] += 1.0;
    for (ItemId i : data.valid_pos[u]) counts[i] += 1.0;
  }
  return counts;
}

System top_popular(const InteractionData& data, std::string name) {
  auto counts = std::make_shared<const std::vector<double>>(top_popular_scores(data));
  return {std::move(name), [counts](UserId, std::span<double> out) {
            std::copy(counts->begin(), counts->end(), out.begin());
          }};
}

System model_system(std::string name, const ModelParams& params, const NeighborIndex& index,
                    std::size_t num_items) {
  std::vector<ItemId> items(num_items);
  std::iota(items.begin(), items.end(), 0);
  auto scorer = std::make_shared<const ItemScorer>(params, index, std::move(items));
  return {std::move(name),
          [scorer](UserId u, std::span<double> out) { scorer->score(u, out); }};
}

const char* split_name(Split split) { return split == Split::kValid ? "valid" : "test"; }

Split parse_split(const std::string& s) {
  if (s == "valid" || s == "validation") return Split::kValid;
  if (s == "test") return Split::kTest;
  throw UsageError("unknown split '" + s + "' (valid|test)");
}

CandidateSet parse_candidate_set(const std::string& s) {
  if (s == "full") return CandidateSet::kFull;
  if (s == "sampled") return CandidateSet::kSampled;
  throw UsageError("unknown candidate set '" + s + "' (full|sampled)");
}

double EvalReport::recall_at(std::size_t k) const {
  for (std::size_t j = 0; j < ks.size(); ++j)
    if (ks[j] == k) return mean_recall[j];
  throw UsageError("K=" + std::to_string(k) + " was not evaluated");
}

double EvalReport::precision_at(std::size_t k) const {
  for (std::size_t j = 0; j < ks.size(); ++j)
    if (ks[j] == k) return mean_precision[j];
  throw UsageError("K=" + std::to_string(k) + " was not evaluated");
}

EvalReport evaluate(const System& system, const InteractionData& data,
                    const EvalOptions& options) {
  if (options.ks.empty()) throw UsageError("no cutoffs requested");
  for (std::size_t k : options.ks)
    if (k == 0) throw UsageError("K must be >= 1");
  const std::size_t k_max = *std::max_element(options.ks.begin(), options.ks.end());
  const auto& relevant_sets = options.split == Split::kValid ? data.valid_pos : data.test_pos;
  const auto& negative_sets = options.split == Split::kValid ? data.valid_neg : data.test_neg;

  std::vector<UserId> users;
  for (UserId u = 0; u < data.num_users; ++u)
    if (options.keep_lists || !relevant_sets[u].empty()) users.push_back(u);

  struct Slot {
    bool has_metrics = false;
    bool has_list = false;
    UserMetrics metrics;
    RankedList list;
  };
  std::vector<Slot> slots(users.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> all(data.num_items);
    std::vector<ItemId> candidates;
    std::vector<double> cand_scores;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const UserId u = users[idx];
      candidates.clear();
      if (options.candidates == CandidateSet::kFull) {
        for (ItemId i = 0; i < data.num_items; ++i)
          if (!contains(data.train_pos[u], i)) candidates.push_back(i);
      } else {
        std::set_union(relevant_sets[u].begin(), relevant_sets[u].end(), negative_sets[u].begin(),
                       negative_sets[u].end(), std::back_inserter(candidates));
        std::erase_if(candidates, [&](ItemId i) { return contains(data.train_pos[u], i); });
      }
      if (candidates.empty()) continue;
      system.score_all(u, all);
      cand_scores.resize(candidates.size());
      for (std::size_t c = 0; c < candidates.size(); ++c) cand_scores[c] = all[candidates[c]];
      RankedList list = rank_top_k(u, candidates, cand_scores, k_max);

      Slot& slot = slots[idx];
      const auto& relevant = relevant_sets[u];
      if (!relevant.empty()) {
        slot.has_metrics = true;
        slot.metrics.user = u;
        slot.metrics.train_count = data.train_pos[u].size();
        slot.metrics.relevant = relevant.size();
        for (std::size_t k : options.ks) {
          const auto pr = precision_recall_at_k(list, relevant, k);
          slot.metrics.precision.push_back(pr.precision);
          slot.metrics.recall.push_back(pr.recall);
          slot.metrics.hits.push_back(pr.hits);
        }
      }
      if (options.keep_lists) {
        slot.has_list = true;
        slot.list = std::move(list);
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, users.size()));
  if (workers <= 1) {
    work(0, users.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (users.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = std::min(users.size(), w * chunk);
      const std::size_t e = std::min(users.size(), b + chunk);
      threads.emplace_back(work, b, e);
    }
    for (auto& t : threads) t.join();
  }

  EvalReport report;
  report.system = system.name;
  report.ks = options.ks;
  report.mean_precision.assign(options.ks.size(), 0.0);
  report.mean_recall.assign(options.ks.size(), 0.0);
  for (auto& slot : slots) {
    if (slot.has_metrics) report.per_user.push_back(std::move(slot.metrics));
    if (slot.has_list) report.lists.push_back(std::move(slot.list));
  }
  // Reduction in ascending user order, independent of the worker count.
  for (const auto& m : report.per_user) {
    for (std::size_t j = 0; j < options.ks.size(); ++j) {
      report.mean_precision[j] += m.precision[j];
      report.mean_recall[j] += m.recall[j];
    }
  }
  if (!report.per_user.empty()) {
    const double n = static_cast<double>(report.per_user.size());
    for (std::size_t j = 0; j < options.ks.size(); ++j) {
      report.mean_precision[j] /= n;
      report.mean_recall[j] /= n;
    }
  }
  return report;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EvalReport>& reports) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "system,K,metric,value\n";
  for (const auto& r : reports) {
    for (std::size_t j = 0; j < r.ks.size(); ++j) {
      out << r.system << ',' << r.ks[j] << ",precision," << format_double(r.mean_precision[j]) << '\n';
      out << r.system << ',' << r.ks[j] << ",recall," << format_double(r.mean_recall[j]) << '\n';
    }
  }
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace kgpl
