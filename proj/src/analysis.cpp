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

#include "kgpl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <spdlog/spdlog.h>

#include "kgpl/util.hpp"

namespace kgpl {

namespace {

std::size_t k_index(const EvalReport& report, std::size_t k) {
  for (std::size_t j = 0; j < report.ks.size(); ++j)
    if (report.ks[j] == k) return j;
  throw UsageError("report '" + report.system + "' has no K=" + std::to_string(k));
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw UsageError("percentile of an empty set");
  if (!(p >= 0.0 && p <= 100.0)) throw UsageError("percentile outside [0, 100]");
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<GroupRow> sparsity_groups(const EvalReport& report,
                                      const std::vector<double>& percentiles, std::size_t k) {
  const std::size_t j = k_index(report, k);
  if (report.per_user.empty()) throw UsageError("no evaluated users");
  std::vector<double> counts;
  for (const auto& m : report.per_user) counts.push_back(static_cast<double>(m.train_count));
  std::vector<GroupRow> rows;
  for (double p : percentiles) {
    GroupRow row;
    row.percentile = p;
    row.threshold = percentile(counts, p);
    double sum = 0.0;
    for (const auto& m : report.per_user) {
      if (static_cast<double>(m.train_count) <= row.threshold) {
        sum += m.recall[j];
        ++row.users;
      }
    }
    row.mean_recall = row.users ? sum / static_cast<double>(row.users) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

WinnerTable winner_analysis(const std::vector<EvalReport>& reports, std::size_t k) {
  if (reports.empty()) throw UsageError("winner analysis needs at least one system");
  const auto& ref = reports.front().per_user;
  std::vector<std::size_t> idx;
  for (const auto& r : reports) {
    idx.push_back(k_index(r, k));
    if (r.per_user.size() != ref.size()) throw UsageError("systems cover different users");
    for (std::size_t n = 0; n < ref.size(); ++n) {
      if (r.per_user[n].user != ref[n].user || r.per_user[n].train_count != ref[n].train_count)
        throw UsageError("systems cover different users");
    }
  }
  WinnerTable table;
  for (const auto& r : reports) table.systems.push_back(r.system);
  std::size_t max_count = 0;
  for (const auto& m : ref) max_count = std::max(max_count, m.train_count);
  for (std::size_t x = 0; x <= max_count; ++x) table.xs.push_back(x);
  std::vector<std::vector<std::size_t>> wins_at(max_count + 1,
                                                std::vector<std::size_t>(reports.size(), 0));
  for (std::size_t n = 0; n < ref.size(); ++n) {
    double best = 0.0;
    for (std::size_t s = 0; s < reports.size(); ++s)
      best = std::max(best, reports[s].per_user[n].recall[idx[s]]);
    if (best == 0.0) continue;
    for (std::size_t s = 0; s < reports.size(); ++s)
      if (reports[s].per_user[n].recall[idx[s]] == best) ++wins_at[ref[n].train_count][s];
  }
  std::vector<std::size_t> running(reports.size(), 0);
  for (std::size_t x = 0; x <= max_count; ++x) {
    for (std::size_t s = 0; s < reports.size(); ++s) running[s] += wins_at[x][s];
    table.cum_wins.push_back(running);
  }
  return table;
}

CoverageRow coverage_analysis(const EvalReport& report, const InteractionData& data,
                              std::size_t k) {
  if (report.lists.empty()) throw UsageError("coverage needs ranked lists (keep_lists)");
  CoverageRow row;
  row.system = report.system;
  row.k = k;
  std::set<ItemId> ranked, relevant;
  for (const auto& list : report.lists) {
    if (list.k < k) throw UsageError("ranked lists are shorter than K=" + std::to_string(k));
    const std::size_t n = std::min(k, list.items.size());
    for (std::size_t r = 0; r < n; ++r) {
      const ItemId i = list.items[r];
      ranked.insert(i);
      if (contains(data.test_pos[list.user], i)) relevant.insert(i);
    }
  }
  auto freqs = [&](const std::set<ItemId>& items) {
    std::vector<double> f;
    for (ItemId i : items) f.push_back(static_cast<double>(data.item_freq[i]));
    return f;
  };
  row.unique_ranked = ranked.size();
  row.unique_relevant = relevant.size();
  row.median_freq_ranked = median(freqs(ranked));
  row.median_freq_relevant = median(freqs(relevant));
  return row;
}

std::vector<SweepRow> sweep(const TrainConfig& base, const std::string& parameter,
                            const std::vector<std::string>& values, const InteractionData& data,
                            const KnowledgeGraph& kg, const TrainOptions& options) {
  if (values.empty()) throw UsageError("sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (std::size_t v = 0; v < values.size(); ++v) {
    TrainConfig config = base;
    set_config_value(config, parameter, values[v]);
    TrainOptions run = options;
    if (!options.out_dir.empty()) run.out_dir = options.out_dir / (parameter + "_" + values[v]);
    SweepRow row;
    row.parameter = parameter;
    row.value = values[v];
    try {
      const TrainReport r = train(config, data, kg, run);
      row.valid_recall10 = r.best_valid_recall;
      if (r.test) row.test_recall10 = r.test->recall_at(10);
    } catch (const NumericError& e) {
      spdlog::warn("sweep {}={} diverged: {}", parameter, values[v], e.what());
      row.diverged = true;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_groups_csv(const std::filesystem::path& path, const std::vector<std::string>& systems,
                      const std::vector<std::vector<GroupRow>>& groups) {
  auto out = open_csv(path);
  out << "system,percentile,threshold,users,mean_recall10\n";
  for (std::size_t s = 0; s < systems.size(); ++s) {
    for (const auto& g : groups[s]) {
      out << systems[s] << ',' << format_double(g.percentile) << ',' << format_double(g.threshold)
          << ',' << g.users << ',' << format_double(g.mean_recall) << '\n';
    }
  }
}

void write_winners_csv(const std::filesystem::path& path, const WinnerTable& table) {
  auto out = open_csv(path);
  out << "x,system,cum_wins\n";
  for (std::size_t x = 0; x < table.xs.size(); ++x)
    for (std::size_t s = 0; s < table.systems.size(); ++s)
      out << table.xs[x] << ',' << table.systems[s] << ',' << table.cum_wins[x][s] << '\n';
}

void write_coverage_csv(const std::filesystem::path& path, const std::vector<CoverageRow>& rows) {
  auto out = open_csv(path);
  out << "system,K,unique_ranked,unique_relevant,median_freq_ranked,median_freq_relevant\n";
  for (const auto& r : rows) {
    out << r.system << ',' << r.k << ',' << r.unique_ranked << ',' << r.unique_relevant << ','
        << format_double(r.median_freq_ranked) << ',' << format_double(r.median_freq_relevant)
        << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_csv(path);
  out << "parameter,value,diverged,valid_recall10,test_recall10\n";
  for (const auto& r : rows) {
    out << r.parameter << ',' << r.value << ',' << (r.diverged ? 1 : 0) << ','
        << format_double(r.valid_recall10) << ',' << format_double(r.test_recall10) << '\n';
  }
}

}  // namespace kgpl
