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

#include "kgpl/kgpl.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "kgpl/analysis.hpp"
#include "kgpl/checkpoint.hpp"
#include "kgpl/config.hpp"
#include "kgpl/eval.hpp"
#include "kgpl/pipeline.hpp"
#include "kgpl/sampler.hpp"
#include "kgpl/trainer.hpp"
#include "kgpl/util.hpp"

struct kgpl_dataset {
  kgpl::Dataset ds;
};

struct kgpl_config {
  kgpl::ConfigGrid grid;
};

struct kgpl_train_result {
  kgpl::GridResult grid;
};

struct kgpl_system {
  // Keep the model and its neighbourhoods alive for the scorer.
  std::unique_ptr<kgpl::ModelParams> params;
  std::unique_ptr<kgpl::NeighborIndex> index;
  kgpl::System system;
  std::size_t num_items = 0;
};

struct kgpl_eval_report {
  kgpl::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
kgpl_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return KGPL_OK;
  } catch (const kgpl::Error& e) {
    g_last_error = e.what();
    return static_cast<kgpl_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return KGPL_INTERNAL_ERROR;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return KGPL_DATA_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KGPL_INTERNAL_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw kgpl::UsageError(std::string(what) + " must not be NULL");
}

void fill_stats(const kgpl::DatasetStats& s, kgpl_dataset_stats* out) {
  *out = {s.users,     s.items,    s.interactions, s.train,     s.valid,  s.test,
          s.valid_neg, s.test_neg, s.entities,     s.relations, s.triples};
}

std::vector<kgpl::EvalReport> collect(const kgpl_eval_report* const* reports, std::size_t n) {
  if (n == 0) throw kgpl::UsageError("no reports given");
  require(reports, "reports");
  std::vector<kgpl::EvalReport> out;
  for (std::size_t k = 0; k < n; ++k) {
    require(reports[k], "report");
    out.push_back(reports[k]->report);
  }
  return out;
}

double metric_of(const kgpl::EvalReport& r, const char* metric, std::uint64_t k) {
  require(metric, "metric");
  if (std::strcmp(metric, "precision") == 0) return r.precision_at(k);
  if (std::strcmp(metric, "recall") == 0) return r.recall_at(k);
  throw kgpl::UsageError(std::string("unknown metric '") + metric + "' (precision|recall)");
}

kgpl::TrainConfig first_config(const kgpl_config* cfg) {
  if (cfg == nullptr) return {};
  const auto grid = cfg->grid.expand();
  if (grid.size() != 1) throw kgpl::UsageError("expected a single configuration, got a grid");
  return grid.front();
}

}  // namespace

extern "C" {

const char* kgpl_last_error(void) { return g_last_error.c_str(); }

const char* kgpl_version(void) { return "1.0.0"; }

kgpl_status kgpl_set_log_level(const char* level) {
  return guard([&] {
    require(level, "level");
    kgpl::set_log_level(level);
  });
}

kgpl_status kgpl_prepare(const char* kind, const char* raw_path, const char* kg_path,
                         const char* item_map_path, const char* out_dir, uint64_t seed,
                         kgpl_dataset_stats* stats) {
  return guard([&] {
    require(kind, "kind");
    require(raw_path, "raw_path");
    require(kg_path, "kg_path");
    require(out_dir, "out_dir");
    kgpl::PrepareOptions o;
    o.kind = kgpl::parse_dataset_kind(kind);
    o.raw = raw_path;
    o.kg = kg_path;
    if (item_map_path) o.item_map = item_map_path;
    o.out_dir = out_dir;
    o.seed = seed;
    const auto ds = kgpl::prepare_dataset(o);
    if (stats) fill_stats(ds.stats(), stats);
  });
}

kgpl_status kgpl_dataset_open(const char* dir, kgpl_dataset** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    *out = nullptr;
    auto h = std::make_unique<kgpl_dataset>();
    h->ds = kgpl::load_dataset(dir);
    *out = h.release();
  });
}

kgpl_status kgpl_dataset_stats_get(const kgpl_dataset* ds, kgpl_dataset_stats* out) {
  return guard([&] {
    require(ds, "dataset");
    require(out, "out");
    fill_stats(ds->ds.stats(), out);
  });
}

void kgpl_dataset_free(kgpl_dataset* ds) { delete ds; }

kgpl_status kgpl_config_create(kgpl_config** out) {
  return guard([&] {
    require(out, "out");
    *out = new kgpl_config();
  });
}

kgpl_status kgpl_config_load(const char* path, kgpl_config** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto h = std::make_unique<kgpl_config>();
    h->grid = kgpl::ConfigGrid::load(path);
    *out = h.release();
  });
}

kgpl_status kgpl_config_set(kgpl_config* cfg, const char* key, const char* values) {
  return guard([&] {
    require(cfg, "config");
    require(key, "key");
    require(values, "values");
    cfg->grid.set(key, values);
  });
}

kgpl_status kgpl_config_get(const kgpl_config* cfg, const char* key, char* buf, size_t buflen) {
  return guard([&] {
    require(cfg, "config");
    require(key, "key");
    require(buf, "buf");
    std::string joined;
    const auto& values = cfg->grid.values();
    if (auto it = values.find(key); it != values.end()) {
      for (std::size_t k = 0; k < it->second.size(); ++k) {
        if (k) joined += ',';
        joined += it->second[k];
      }
    } else {
      const kgpl::TrainConfig defaults;
      bool found = false;
      for (const auto& [name, v] : defaults.to_pairs()) {
        if (name == key) {
          joined = v;
          found = true;
        }
      }
      if (!found) throw kgpl::UsageError(std::string("unknown config key '") + key + "'");
    }
    if (joined.size() + 1 > buflen) throw kgpl::UsageError("buffer too small");
    std::memcpy(buf, joined.c_str(), joined.size() + 1);
  });
}

size_t kgpl_config_grid_size(const kgpl_config* cfg) { return cfg ? cfg->grid.size() : 0; }

void kgpl_config_free(kgpl_config* cfg) { delete cfg; }

kgpl_status kgpl_train(const kgpl_dataset* ds, const kgpl_config* cfg, const char* out_dir,
                       int dry_run, kgpl_train_result** out) {
  return guard([&] {
    require(ds, "dataset");
    require(cfg, "config");
    require(out, "out");
    *out = nullptr;
    kgpl::TrainOptions opts;
    if (out_dir) opts.out_dir = out_dir;
    opts.dry_run = dry_run != 0;
    auto h = std::make_unique<kgpl_train_result>();
    h->grid = kgpl::grid_search(cfg->grid.expand(), ds->ds.data, ds->ds.kg, opts);
    *out = h.release();
  });
}

double kgpl_train_result_best_valid_recall(const kgpl_train_result* r) {
  return r ? r->grid.best_report.best_valid_recall : 0.0;
}

uint64_t kgpl_train_result_steps(const kgpl_train_result* r) {
  return r ? r->grid.best_report.steps : 0;
}

uint64_t kgpl_train_result_best_step(const kgpl_train_result* r) {
  return r ? r->grid.best_report.best_step : 0;
}

size_t kgpl_train_result_curve_length(const kgpl_train_result* r) {
  return r ? r->grid.best_report.curve.size() : 0;
}

double kgpl_train_result_curve_recall(const kgpl_train_result* r, size_t i) {
  if (!r || i >= r->grid.best_report.curve.size()) return 0.0;
  return r->grid.best_report.curve[i].recall_f;
}

kgpl_status kgpl_train_result_test_metric(const kgpl_train_result* r, const char* metric,
                                          uint64_t k, double* out) {
  return guard([&] {
    require(r, "result");
    require(out, "out");
    if (!r->grid.best_report.test) throw kgpl::UsageError("no test evaluation was run");
    *out = metric_of(*r->grid.best_report.test, metric, k);
  });
}

size_t kgpl_train_result_best_index(const kgpl_train_result* r) { return r ? r->grid.best : 0; }

void kgpl_train_result_free(kgpl_train_result* r) { delete r; }

kgpl_status kgpl_system_top_popular(const kgpl_dataset* ds, kgpl_system** out) {
  return guard([&] {
    require(ds, "dataset");
    require(out, "out");
    auto h = std::make_unique<kgpl_system>();
    h->system = kgpl::top_popular(ds->ds.data);
    h->num_items = ds->ds.data.num_items;
    *out = h.release();
  });
}

kgpl_status kgpl_system_from_checkpoint(const kgpl_dataset* ds, const char* path,
                                        const kgpl_config* cfg, const char* name,
                                        kgpl_system** out) {
  return guard([&] {
    require(ds, "dataset");
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    const kgpl::TrainConfig c = first_config(cfg);
    const auto& d = ds->ds;
    const kgpl::ModelDims expected{d.data.num_users, d.kg.num_entities(), d.kg.num_relations() + 1,
                                   0, 0};
    auto ck = kgpl::load_checkpoint(path);
    const auto& got = ck.params.dims;
    if (got.num_users != expected.num_users || got.num_entities != expected.num_entities ||
        got.num_relations != expected.num_relations) {
      throw kgpl::DataError(std::string("checkpoint ") + path + " does not match the dataset");
    }
    auto h = std::make_unique<kgpl_system>();
    h->params = std::make_unique<kgpl::ModelParams>(std::move(ck.params));
    h->index = std::make_unique<kgpl::NeighborIndex>(
        kgpl::build_neighbor_index(d.kg, c.neighbor_size, c.data_seed));
    h->num_items = d.data.num_items;
    h->system = kgpl::model_system(name ? name : "KGPL", *h->params, *h->index, h->num_items);
    *out = h.release();
  });
}

kgpl_status kgpl_system_score(const kgpl_system* sys, uint32_t user, double* out, size_t n) {
  return guard([&] {
    require(sys, "system");
    require(out, "out");
    if (n != sys->num_items) throw kgpl::UsageError("score buffer must hold one entry per item");
    if (sys->params && user >= sys->params->dims.num_users)
      throw kgpl::UsageError("user id out of range");
    sys->system.score_all(user, std::span<double>(out, n));
  });
}

void kgpl_system_free(kgpl_system* sys) { delete sys; }

kgpl_status kgpl_evaluate(const kgpl_dataset* ds, const kgpl_system* sys,
                          const kgpl_eval_options* options, kgpl_eval_report** out) {
  return guard([&] {
    require(ds, "dataset");
    require(sys, "system");
    require(out, "out");
    *out = nullptr;
    kgpl::EvalOptions eo;
    if (options) {
      if (options->split) eo.split = kgpl::parse_split(options->split);
      if (options->candidate_set) eo.candidates = kgpl::parse_candidate_set(options->candidate_set);
      if (options->ks) eo.ks.assign(options->ks, options->ks + options->num_ks);
      eo.workers = options->workers ? options->workers : 1;
      eo.keep_lists = options->keep_lists != 0;
    }
    auto h = std::make_unique<kgpl_eval_report>();
    h->report = kgpl::evaluate(sys->system, ds->ds.data, eo);
    *out = h.release();
  });
}

kgpl_status kgpl_eval_report_metric(const kgpl_eval_report* r, const char* metric, uint64_t k,
                                    double* out) {
  return guard([&] {
    require(r, "report");
    require(out, "out");
    *out = metric_of(r->report, metric, k);
  });
}

size_t kgpl_eval_report_num_users(const kgpl_eval_report* r) {
  return r ? r->report.per_user.size() : 0;
}

void kgpl_eval_report_free(kgpl_eval_report* r) { delete r; }

kgpl_status kgpl_write_metrics_csv(const char* path, const kgpl_eval_report* const* reports,
                                   size_t n) {
  return guard([&] {
    require(path, "path");
    kgpl::write_metrics_csv(path, collect(reports, n));
  });
}

kgpl_status kgpl_write_groups_csv(const char* path, const kgpl_eval_report* const* reports,
                                  size_t n) {
  return guard([&] {
    require(path, "path");
    const auto all = collect(reports, n);
    std::vector<std::string> names;
    std::vector<std::vector<kgpl::GroupRow>> groups;
    for (const auto& r : all) {
      names.push_back(r.system);
      groups.push_back(kgpl::sparsity_groups(r));
    }
    kgpl::write_groups_csv(path, names, groups);
  });
}

kgpl_status kgpl_write_winners_csv(const char* path, const kgpl_eval_report* const* reports,
                                   size_t n) {
  return guard([&] {
    require(path, "path");
    kgpl::write_winners_csv(path, kgpl::winner_analysis(collect(reports, n)));
  });
}

kgpl_status kgpl_write_coverage_csv(const char* path, const kgpl_dataset* ds,
                                    const kgpl_eval_report* const* reports, size_t n,
                                    const uint64_t* ks, size_t num_ks) {
  return guard([&] {
    require(path, "path");
    require(ds, "dataset");
    require(ks, "ks");
    std::vector<kgpl::CoverageRow> rows;
    for (const auto& r : collect(reports, n))
      for (std::size_t k = 0; k < num_ks; ++k)
        rows.push_back(kgpl::coverage_analysis(r, ds->ds.data, ks[k]));
    kgpl::write_coverage_csv(path, rows);
  });
}

kgpl_status kgpl_dump_pathcounts(const kgpl_dataset* ds, uint32_t user, unsigned horizon,
                                 double cap, const char* path) {
  return guard([&] {
    require(ds, "dataset");
    require(path, "path");
    const auto& data = ds->ds.data;
    if (user >= data.num_users) throw kgpl::UsageError("user id out of range");
    const auto counts =
        kgpl::count_paths(ds->ds.kg, data.num_items, data.train_pos[user], horizon, cap, user);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw kgpl::DataError(std::string("cannot write ") + path);
    out << "item,count\n";
    for (std::size_t i = 0; i < counts.counts.size(); ++i) {
      if (kgpl::contains(counts.observed, static_cast<kgpl::ItemId>(i))) continue;
      out << i << ',' << kgpl::format_double(counts.counts[i]) << '\n';
    }
  });
}

kgpl_status kgpl_sweep(const kgpl_dataset* ds, const kgpl_config* cfg, const char* parameter,
                       const char* values, const char* out_dir, const char* csv_path) {
  return guard([&] {
    require(ds, "dataset");
    require(parameter, "parameter");
    require(values, "values");
    require(csv_path, "csv_path");
    std::vector<std::string> list;
    for (const auto& v : kgpl::split_on(values, ',')) list.emplace_back(kgpl::trim(v));
    kgpl::TrainOptions opts;
    if (out_dir) opts.out_dir = out_dir;
    const auto rows =
        kgpl::sweep(first_config(cfg), parameter, list, ds->ds.data, ds->ds.kg, opts);
    kgpl::write_sweep_csv(csv_path, rows);
  });
}

kgpl_status kgpl_gradcheck(uint64_t seed, size_t dim, size_t layers, size_t neighbor_size,
                           double tolerance, kgpl_gradcheck_result* out) {
  return guard([&] {
    require(out, "out");
    kgpl::GradCheckSpec spec;
    spec.seed = seed;
    spec.dim = dim;
    spec.layers = layers;
    spec.neighbor_size = neighbor_size;
    spec.tolerance = tolerance;
    const auto r = kgpl::gradient_check(spec);
    out->max_relative_error = r.max_relative_error;
    out->passed = r.passed ? 1 : 0;
  });
}

}  // extern "C"
