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

#ifndef KGPL_TRAINER_HPP_
#define KGPL_TRAINER_HPP_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kgpl/config.hpp"
#include "kgpl/data.hpp"
#include "kgpl/eval.hpp"
#include "kgpl/kg_store.hpp"
#include "kgpl/model.hpp"
#include "kgpl/sampler.hpp"

namespace kgpl {

struct CurvePoint {
  std::size_t step = 0;
  double epoch = 0.0;
  double recall_f = 0.0;
  std::optional<double> recall_g;  // co-training only
};

// Snapshot handed to TrainHooks::on_step after sampling, before any update.
// batches[m] was pseudo-labelled by model m; model m is then updated on
// batches[trained_on[m]].
struct StepRecord {
  std::size_t step = 0;
  bool warmup = false;
  std::vector<MiniBatch> batches;
  std::vector<std::size_t> trained_on;
  std::vector<const ModelParams*> models;
  const NeighborIndex* index = nullptr;
};

struct TrainHooks {
  std::function<void(const StepRecord&)> on_step;
};

struct TrainOptions {
  std::filesystem::path out_dir;  // empty: nothing written
  bool dry_run = false;           // one batch, one update, no evaluation
  bool final_test = true;         // evaluate the best f on the test split
  TrainHooks hooks;
};

struct TrainReport {
  TrainConfig config;
  std::vector<CurvePoint> curve;
  double best_valid_recall = 0.0;
  std::size_t best_step = 0;
  double best_epoch = 0.0;
  std::size_t steps = 0;
  std::size_t steps_per_epoch = 0;
  bool stopped_early = false;
  double last_loss_f = 0.0;
  std::filesystem::path checkpoint;
  ModelParams best_params;  // f at its best evaluation, rounded to checkpoint precision
  std::optional<EvalReport> test;
};

// ceil(num_train / triples): each train positive is expected once per epoch.
std::size_t steps_per_epoch(std::size_t num_train, std::size_t triples);

// Trains f (and g for co-training variants). Throws NumericError after
// writing last_batch.tsv to out_dir when the loss or a parameter goes
// non-finite.
TrainReport train(const TrainConfig& config, const InteractionData& data, const KnowledgeGraph& kg,
                  const TrainOptions& options = {});

struct GridEntry {
  TrainConfig config;
  bool diverged = false;
  std::string error;
  double best_valid_recall = 0.0;
  std::optional<double> test_recall10;
};

struct GridResult {
  std::vector<GridEntry> entries;
  std::size_t best = 0;
  TrainReport best_report;
};

// Trains every grid point (each under out_dir/run_NNN) and keeps the one
// with the highest validation R@10; writes grid.csv to out_dir.
GridResult grid_search(const std::vector<TrainConfig>& grid, const InteractionData& data,
                       const KnowledgeGraph& kg, const TrainOptions& options = {});

// Parameters rounded through float32, as a checkpoint round trip would.
ModelParams round_to_float(const ModelParams& params);

}  // namespace kgpl

#endif  // KGPL_TRAINER_HPP_
