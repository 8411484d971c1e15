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

#include "kgpl/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "kgpl/checkpoint.hpp"
#include "kgpl/optimizer.hpp"
#include "kgpl/util.hpp"

namespace kgpl {

namespace {

constexpr std::uint64_t kDropoutStreamTag = 17;
constexpr std::uint64_t kSamplerStreamTag = 23;

struct Learner {
  ModelParams params;
  AdamState adam;
  Rng dropout_rng;
};

const char* kind_name(RowKind k) {
  switch (k) {
    case RowKind::kPositive: return "positive";
    case RowKind::kNegative: return "negative";
    case RowKind::kPseudo: return "pseudo";
  }
  return "?";
}

void dump_batch(const std::filesystem::path& path, const MiniBatch& batch) {
  std::ofstream out(path, std::ios::trunc);
  out << "user\titem\tlabel\tkind\tlabel_source\n";
  for (const auto& r : batch.rows) {
    out << r.user << '\t' << r.item << '\t' << format_double(r.label) << '\t' << kind_name(r.kind)
        << '\t' << r.label_source << '\n';
  }
}

class MetricsLog {
 public:
  explicit MetricsLog(const std::filesystem::path& path) {
    if (path.empty()) return;
    out_.open(path, std::ios::trunc);
    if (!out_) throw DataError("cannot write " + path.string());
    out_ << "step,epoch,split,metric,value\n";
  }
  void row(std::size_t step, double epoch, const char* split, const std::string& metric,
           double value) {
    if (!out_.is_open()) return;
    out_ << step << ',' << format_double(epoch) << ',' << split << ',' << metric << ','
         << format_double(value) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

double validation_recall(const ModelParams& params, const NeighborIndex& index,
                         const InteractionData& data, const TrainConfig& config) {
  EvalOptions eo;
  eo.split = Split::kValid;
  eo.candidates = config.candidate_set;
  eo.ks = {10};
  eo.workers = config.workers;
  return evaluate(model_system("valid", params, index, data.num_items), data, eo).recall_at(10);
}

void write_report_json(const std::filesystem::path& path, const TrainReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : r.config.to_pairs()) cfg[k] = v;
  j["config"] = cfg;
  j["steps"] = r.steps;
  j["steps_per_epoch"] = r.steps_per_epoch;
  j["stopped_early"] = r.stopped_early;
  j["best_valid_recall10"] = r.best_valid_recall;
  j["best_step"] = r.best_step;
  j["best_epoch"] = r.best_epoch;
  j["checkpoint"] = r.checkpoint.filename().string();
  auto curve = nlohmann::ordered_json::array();
  for (const auto& p : r.curve) {
    nlohmann::ordered_json c;
    c["step"] = p.step;
    c["epoch"] = p.epoch;
    c["valid_recall10_f"] = p.recall_f;
    if (p.recall_g) c["valid_recall10_g"] = *p.recall_g;
    curve.push_back(c);
  }
  j["curve"] = curve;
  if (r.test) {
    nlohmann::ordered_json t;
    for (std::size_t k = 0; k < r.test->ks.size(); ++k) {
      const std::string K = std::to_string(r.test->ks[k]);
      t["P@" + K] = r.test->mean_precision[k];
      t["R@" + K] = r.test->mean_recall[k];
    }
    t["users"] = r.test->per_user.size();
    j["test"] = t;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

std::size_t steps_per_epoch(std::size_t num_train, std::size_t triples) {
  if (triples == 0) throw UsageError("batch must contain at least one triple");
  return std::max<std::size_t>(1, (num_train + triples - 1) / triples);
}

ModelParams round_to_float(const ModelParams& params) {
  ModelParams out = params;
  for (Matrix* m : out.tensors())
    for (double& v : m->flat()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

TrainReport train(const TrainConfig& config, const InteractionData& data, const KnowledgeGraph& kg,
                  const TrainOptions& options) {
  config.validate();
  if (kg.num_entities() < data.num_items) {
    throw DataError("knowledge graph has fewer entities than the item catalog");
  }
  if (data.num_train() == 0) throw DataError("no training interactions");
  const bool write = !options.out_dir.empty();
  if (write) std::filesystem::create_directories(options.out_dir);

  const ModelDims dims{data.num_users, kg.num_entities(), kg.num_relations() + 1, config.dim,
                       config.layers};
  const bool cot = uses_cotraining(config.variant);
  const std::size_t num_models = cot ? 2 : 1;

  std::vector<Learner> learners;
  for (std::size_t m = 0; m < num_models; ++m) {
    const std::uint64_t seed = m == 0 ? config.model_f_seed : config.model_g_seed;
    learners.push_back({ModelParams::initialize(dims, seed), AdamState::zeros(dims),
                        Rng::stream(seed, kDropoutStreamTag)});
  }

  NeighborIndex index = build_neighbor_index(kg, config.neighbor_size, config.data_seed);
  SamplerOptions so;
  so.a = config.a;
  so.b = config.b;
  so.horizon = config.h;
  so.path_cap = config.path_cap;
  so.kg_aware = uses_kg_sampling(config.variant);
  so.popularity_negatives = !config.uns;
  const TrainingSampler sampler(data, kg, so);
  if (sampler.eligible_users().empty()) throw DataError("no user is eligible for training");
  Rng sampler_rng = Rng::stream(config.sampler_seed, kSamplerStreamTag);

  TrainReport report;
  report.config = config;
  report.steps_per_epoch = steps_per_epoch(data.num_train(), config.triples());
  const std::size_t spe = report.steps_per_epoch;
  const std::size_t eval_every = config.eval_every ? config.eval_every : spe;
  const std::size_t total_steps = options.dry_run ? 1 : config.epochs * spe;
  const std::size_t warmup_steps = options.dry_run ? 0 : config.warmup_epochs * spe;
  if (write) report.checkpoint = options.out_dir / "best_f.ckpt";

  MetricsLog log(write ? options.out_dir / "metrics_log.csv" : std::filesystem::path());
  std::size_t since_improvement = 0;

  auto record_eval = [&](std::size_t step) {
    const double epoch = static_cast<double>(step) / static_cast<double>(spe);
    CurvePoint p;
    p.step = step;
    p.epoch = epoch;
    p.recall_f = validation_recall(learners[0].params, index, data, config);
    log.row(step, epoch, "valid", "recall@10_f", p.recall_f);
    if (cot) {
      p.recall_g = validation_recall(learners[1].params, index, data, config);
      log.row(step, epoch, "valid", "recall@10_g", *p.recall_g);
    }
    spdlog::info("step {} epoch {:.2f}: valid R@10 f={:.4f}{}", step, epoch, p.recall_f,
                 p.recall_g ? fmt::format(" g={:.4f}", *p.recall_g) : std::string());
    report.curve.push_back(p);
    if (report.curve.size() == 1 || p.recall_f > report.best_valid_recall) {
      report.best_valid_recall = p.recall_f;
      report.best_step = step;
      report.best_epoch = epoch;
      report.best_params = round_to_float(learners[0].params);
      if (write) save_checkpoint(report.checkpoint, learners[0].params, learners[0].adam);
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
  };

  if (!options.dry_run) record_eval(0);

  ModelParams grads = ModelParams::zeros(dims);
  std::vector<MiniBatch> batches(num_models);
  for (std::size_t step = 1; step <= total_steps; ++step) {
    if (config.resample_neighbors && step > 1 && (step - 1) % spe == 0) {
      const std::uint64_t epoch = (step - 1) / spe;
      index = build_neighbor_index(kg, config.neighbor_size,
                                   config.data_seed + epoch * 0x9E3779B97F4A7C15ULL);
    }
    const bool warmup = step <= warmup_steps;
    for (std::size_t m = 0; m < num_models; ++m) {
      BatchRequest req;
      req.triples = config.triples();
      req.pseudo_per_positive = config.pseudo_per_positive;
      req.include_pseudo = uses_pseudo_labels(config.variant) && !warmup;
      req.label_source = static_cast<int>(m);
      const ModelParams& labeler_params = learners[m].params;
      const Labeler labeler = [&](UserId u, ItemId i) {
        return forward(labeler_params, index, u, i);
      };
      batches[m] = sample_minibatch(sampler, labeler, req, sampler_rng);
    }
    // Each model learns from the batch its peer labelled.
    std::vector<std::size_t> trained_on(num_models);
    for (std::size_t m = 0; m < num_models; ++m) trained_on[m] = cot ? 1 - m : m;

    if (options.hooks.on_step) {
      StepRecord rec;
      rec.step = step;
      rec.warmup = warmup;
      rec.batches = batches;
      rec.trained_on = trained_on;
      for (const auto& l : learners) rec.models.push_back(&l.params);
      rec.index = &index;
      options.hooks.on_step(rec);
    }

    for (std::size_t m = 0; m < num_models; ++m) {
      Learner& l = learners[m];
      const MiniBatch& batch = batches[trained_on[m]];
      const double loss =
          loss_and_grad(batch, l.params, index, config.dropout, l.dropout_rng, grads, config.workers);
      bool finite = std::isfinite(loss) && grads.all_finite();
      if (finite) {
        adam_step(l.params, grads, l.adam, config.lr);
        finite = l.params.all_finite();
      }
      if (!finite) {
        std::string where;
        if (write) {
          dump_batch(options.out_dir / "last_batch.tsv", batch);
          where = "; last batch written to " + (options.out_dir / "last_batch.tsv").string();
        }
        throw NumericError("training diverged at step " + std::to_string(step) + " (model " +
                           (m == 0 ? "f" : "g") + ")" + where);
      }
      const double epoch = static_cast<double>(step) / static_cast<double>(spe);
      log.row(step, epoch, "train", m == 0 ? "loss_f" : "loss_g", loss);
      if (m == 0) report.last_loss_f = loss;
    }
    report.steps = step;

    if (options.dry_run) break;
    if (step % eval_every == 0 || step == total_steps) {
      record_eval(step);
      if (since_improvement >= config.patience) {
        report.stopped_early = true;
        spdlog::info("early stop at step {} (best step {})", step, report.best_step);
        break;
      }
    }
  }

  if (options.dry_run) {
    report.best_params = round_to_float(learners[0].params);
    if (write) {
      save_checkpoint(report.checkpoint, learners[0].params, learners[0].adam);
      write_report_json(options.out_dir / "report.json", report);
    }
    return report;
  }

  if (options.final_test) {
    EvalOptions eo;
    eo.split = Split::kTest;
    eo.candidates = config.candidate_set;
    eo.workers = config.workers;
    const std::string name = std::string("KGPL_") + variant_name(config.variant) +
                             (config.uns ? "_uns" : "");
    report.test = evaluate(model_system(name, report.best_params, index, data.num_items), data, eo);
    for (std::size_t k = 0; k < report.test->ks.size(); ++k) {
      const std::string K = std::to_string(report.test->ks[k]);
      log.row(report.best_step, report.best_epoch, "test", "precision@" + K,
              report.test->mean_precision[k]);
      log.row(report.best_step, report.best_epoch, "test", "recall@" + K,
              report.test->mean_recall[k]);
    }
    if (write) write_metrics_csv(options.out_dir / "metrics.csv", {*report.test});
  }
  if (write) {
    std::ofstream(options.out_dir / "config.txt", std::ios::trunc) << format_config(config);
    write_report_json(options.out_dir / "report.json", report);
  }
  return report;
}

GridResult grid_search(const std::vector<TrainConfig>& grid, const InteractionData& data,
                       const KnowledgeGraph& kg, const TrainOptions& options) {
  if (grid.empty()) throw UsageError("empty configuration grid");
  GridResult result;
  bool have_best = false;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    TrainOptions run = options;
    if (!options.out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "run_%03zu", g);
      run.out_dir = grid.size() == 1 ? options.out_dir : options.out_dir / name;
    }
    GridEntry entry;
    entry.config = grid[g];
    spdlog::info("grid point {}/{}", g + 1, grid.size());
    try {
      TrainReport r = train(grid[g], data, kg, run);
      entry.best_valid_recall = r.best_valid_recall;
      if (r.test) entry.test_recall10 = r.test->recall_at(10);
      if (!have_best || r.best_valid_recall > result.entries[result.best].best_valid_recall) {
        result.best = g;
        result.best_report = std::move(r);
        have_best = true;
      }
    } catch (const NumericError& e) {
      spdlog::warn("grid point {} diverged: {}", g, e.what());
      entry.diverged = true;
      entry.error = e.what();
    }
    result.entries.push_back(std::move(entry));
  }
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    std::ofstream out(options.out_dir / "grid.csv", std::ios::trunc);
    out << "run";
    for (const auto& key : config_keys()) out << ',' << key;
    out << ",diverged,best_valid_recall10,test_recall10\n";
    for (std::size_t g = 0; g < result.entries.size(); ++g) {
      const auto& e = result.entries[g];
      out << g;
      for (const auto& [k, v] : e.config.to_pairs()) out << ',' << v;
      out << ',' << (e.diverged ? 1 : 0) << ',' << format_double(e.best_valid_recall) << ','
          << (e.test_recall10 ? format_double(*e.test_recall10) : std::string());
      out << '\n';
    }
  }
  if (!have_best) throw NumericError("every grid point diverged");
  return result;
}

}  // namespace kgpl
