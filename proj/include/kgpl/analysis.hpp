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

#ifndef KGPL_ANALYSIS_HPP_
#define KGPL_ANALYSIS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "kgpl/config.hpp"
#include "kgpl/eval.hpp"
#include "kgpl/kg_store.hpp"
#include "kgpl/trainer.hpp"

namespace kgpl {

// Linear interpolation between order statistics (rank p/100 * (n-1)).
double percentile(std::vector<double> values, double p);
// Mean of the two middle values for even sizes; NaN when empty.
double median(std::vector<double> values);

struct GroupRow {
  double percentile = 0.0;
  double threshold = 0.0;
  std::size_t users = 0;
  double mean_recall = 0.0;
};

// Cumulative groups: users whose train count is <= the percentile of the
// evaluated users' train counts. Uses R@k from `report`.
std::vector<GroupRow> sparsity_groups(const EvalReport& report,
                                      const std::vector<double>& percentiles = {25, 50, 75, 100},
                                      std::size_t k = 10);

struct WinnerTable {
  std::vector<std::string> systems;
  std::vector<std::size_t> xs;                     // train-count thresholds
  std::vector<std::vector<std::size_t>> cum_wins;  // [x][system]
};

// Per user, every system tied at the best R@k wins, unless that best is 0.
// Throws UsageError when the reports cover different users.
WinnerTable winner_analysis(const std::vector<EvalReport>& reports, std::size_t k = 10);

struct CoverageRow {
  std::string system;
  std::size_t k = 0;
  std::size_t unique_ranked = 0;
  std::size_t unique_relevant = 0;
  double median_freq_ranked = 0.0;
  double median_freq_relevant = 0.0;
};

// Needs a report built with keep_lists. Relevance is test-split membership;
// frequencies are train-split counts.
CoverageRow coverage_analysis(const EvalReport& report, const InteractionData& data,
                              std::size_t k);

struct SweepRow {
  std::string parameter;
  std::string value;
  bool diverged = false;
  double valid_recall10 = 0.0;
  double test_recall10 = 0.0;
};

// Trains `base` once per value of `parameter`.
std::vector<SweepRow> sweep(const TrainConfig& base, const std::string& parameter,
                            const std::vector<std::string>& values, const InteractionData& data,
                            const KnowledgeGraph& kg, const TrainOptions& options = {});

void write_groups_csv(const std::filesystem::path& path, const std::vector<std::string>& systems,
                      const std::vector<std::vector<GroupRow>>& groups);
void write_winners_csv(const std::filesystem::path& path, const WinnerTable& table);
void write_coverage_csv(const std::filesystem::path& path, const std::vector<CoverageRow>& rows);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace kgpl

#endif  // KGPL_ANALYSIS_HPP_
