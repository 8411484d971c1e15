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

// kgpl: prepare datasets, train, evaluate, analyze and gradient-check.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgpl/kgpl.h"

namespace fs = std::filesystem;

namespace {

struct Failure {
  kgpl_status status;
};

void check(kgpl_status s) {
  if (s != KGPL_OK) throw Failure{s};
}

// Relative paths that do not exist locally are looked up under KGPL_DATA_DIR.
std::string resolve(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || fs::exists(path)) return path;
  if (const char* root = std::getenv("KGPL_DATA_DIR")) {
    const fs::path candidate = fs::path(root) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

struct DatasetPtr {
  kgpl_dataset* p = nullptr;
  ~DatasetPtr() { kgpl_dataset_free(p); }
};
struct ConfigPtr {
  kgpl_config* p = nullptr;
  ~ConfigPtr() { kgpl_config_free(p); }
};
struct SystemPtr {
  kgpl_system* p = nullptr;
  SystemPtr() = default;
  SystemPtr(SystemPtr&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~SystemPtr() { kgpl_system_free(p); }
};
struct ReportPtr {
  kgpl_eval_report* p = nullptr;
  ReportPtr() = default;
  ReportPtr(ReportPtr&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~ReportPtr() { kgpl_eval_report_free(p); }
};

void open_dataset(const std::string& dir, DatasetPtr& ds) {
  check(kgpl_dataset_open(resolve(dir).c_str(), &ds.p));
}

// Config file (optional) plus key=value overrides; overrides win.
void build_config(const std::string& path, const std::vector<std::string>& overrides,
                  ConfigPtr& cfg) {
  if (!path.empty()) check(kgpl_config_load(resolve(path).c_str(), &cfg.p));
  else check(kgpl_config_create(&cfg.p));
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      throw Failure{KGPL_USAGE_ERROR};
    }
    check(kgpl_config_set(cfg.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
}

struct SystemSpec {
  std::vector<std::string> checkpoints;  // [name=]path
  bool top_popular = false;
};

std::vector<SystemPtr> load_systems(const kgpl_dataset* ds, const SystemSpec& spec,
                                    const std::string& config_path,
                                    const std::vector<std::string>& overrides) {
  std::vector<SystemPtr> out;
  if (spec.top_popular) {
    SystemPtr s;
    check(kgpl_system_top_popular(ds, &s.p));
    out.push_back(std::move(s));
  }
  for (const auto& entry : spec.checkpoints) {
    std::string name = "KGPL", path = entry;
    if (auto eq = entry.find('='); eq != std::string::npos) {
      name = entry.substr(0, eq);
      path = entry.substr(eq + 1);
    }
    // Neighbourhood settings come from the run's config snapshot unless given.
    std::string cfg_path = config_path;
    const fs::path snapshot = fs::path(path).parent_path() / "config.txt";
    if (cfg_path.empty() && fs::exists(snapshot)) cfg_path = snapshot.string();
    ConfigPtr cfg;
    build_config(cfg_path, overrides, cfg);
    SystemPtr s;
    check(kgpl_system_from_checkpoint(ds, resolve(path).c_str(), cfg.p, name.c_str(), &s.p));
    out.push_back(std::move(s));
  }
  if (out.empty()) {
    std::fprintf(stderr, "error: give --checkpoint and/or --top-popular\n");
    throw Failure{KGPL_USAGE_ERROR};
  }
  return out;
}

std::vector<ReportPtr> evaluate_all(const kgpl_dataset* ds, const std::vector<SystemPtr>& systems,
                                    const std::vector<uint64_t>& ks, const std::string& split,
                                    const std::string& candidates, std::size_t workers,
                                    bool keep_lists) {
  kgpl_eval_options eo{};
  eo.split = split.c_str();
  eo.candidate_set = candidates.c_str();
  eo.ks = ks.data();
  eo.num_ks = ks.size();
  eo.workers = workers;
  eo.keep_lists = keep_lists ? 1 : 0;
  std::vector<ReportPtr> reports;
  for (const auto& s : systems) {
    ReportPtr r;
    check(kgpl_evaluate(ds, s.p, &eo, &r.p));
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<const kgpl_eval_report*> raw(const std::vector<ReportPtr>& reports) {
  std::vector<const kgpl_eval_report*> out;
  for (const auto& r : reports) out.push_back(r.p);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KGPL knowledge-graph recommender with pseudo-labelling"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->capture_default_str();

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Convert, split and write a dataset directory");
  std::string kind, raw_path, kg_path, item_map, prep_out;
  std::uint64_t prep_seed = 0;
  prepare->add_option("--kind", kind, "movielens1m|lastfm|bookcrossing|generic-tsv")->required();
  prepare->add_option("--raw", raw_path, "Raw interaction file")->required();
  prepare->add_option("--kg", kg_path, "Knowledge-graph triples file")->required();
  prepare->add_option("--item-map", item_map, "raw_id<TAB>item_id lines");
  prepare->add_option("--out-dir", prep_out, "Output dataset directory")->required();
  prepare->add_option("--seed", prep_seed, "Split and negative-sampling seed")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Train (grid-search) a model");
  std::string train_ds, train_cfg, train_out, variant, train_candidates;
  std::vector<std::string> train_set;
  std::size_t train_workers = 0;
  bool dry_run = false;
  train->add_option("--dataset", train_ds, "Prepared dataset directory")->required();
  train->add_option("--config", train_cfg, "key = value config file");
  train->add_option("--set", train_set, "key=value override (repeatable)");
  train->add_option("--variant", variant, "nopl|rand_self|kapl_self|rand_cot|kapl_cot");
  train->add_option("--workers", train_workers, "Worker threads");
  train->add_option("--candidate-set", train_candidates, "full|sampled");
  train->add_option("--out-dir", train_out, "Run directory")->required();
  train->add_flag("--dry-run", dry_run, "One batch and one update, then exit");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Top-K precision/recall on a split");
  std::string eval_ds, eval_cfg, eval_out, eval_split = "test", eval_candidates = "full";
  std::vector<std::string> eval_set;
  std::vector<uint64_t> eval_ks{10, 20, 50, 100};
  std::size_t eval_workers = 1;
  SystemSpec eval_systems;
  evaluate->add_option("--dataset", eval_ds, "Prepared dataset directory")->required();
  evaluate->add_option("--checkpoint", eval_systems.checkpoints, "[name=]path (repeatable)");
  evaluate->add_flag("--top-popular", eval_systems.top_popular, "Include TopPopular");
  evaluate->add_option("--config", eval_cfg, "Config giving neighbor_size and data_seed");
  evaluate->add_option("--set", eval_set, "key=value override (repeatable)");
  evaluate->add_option("--ks", eval_ks, "Cutoffs")->delimiter(',')->capture_default_str();
  evaluate->add_option("--split", eval_split, "valid|test")->capture_default_str();
  evaluate->add_option("--candidate-set", eval_candidates, "full|sampled")->capture_default_str();
  evaluate->add_option("--workers", eval_workers, "Worker threads")->capture_default_str();
  evaluate->add_option("--out-dir", eval_out, "Directory for metrics.csv")->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Analyses over evaluated systems");
  analyze->require_subcommand(1);
  std::string an_ds, an_cfg, an_out;
  std::vector<std::string> an_set;
  std::size_t an_workers = 1;
  SystemSpec an_systems;
  std::vector<uint64_t> cov_ks{10, 20, 50, 100};
  auto add_system_opts = [&](CLI::App* sub) {
    sub->add_option("--dataset", an_ds, "Prepared dataset directory")->required();
    sub->add_option("--checkpoint", an_systems.checkpoints, "[name=]path (repeatable)");
    sub->add_flag("--top-popular", an_systems.top_popular, "Include TopPopular");
    sub->add_option("--config", an_cfg, "Config giving neighbor_size and data_seed");
    sub->add_option("--set", an_set, "key=value override (repeatable)");
    sub->add_option("--workers", an_workers, "Worker threads")->capture_default_str();
    sub->add_option("--out-dir", an_out, "Output directory")->required();
  };
  auto* groups = analyze->add_subcommand("groups", "Sparsity-group R@10 (groups.csv)");
  add_system_opts(groups);
  auto* winners = analyze->add_subcommand("winners", "Cumulative per-user winners (winners.csv)");
  add_system_opts(winners);
  auto* coverage = analyze->add_subcommand("coverage", "Item coverage of top-K lists (coverage.csv)");
  add_system_opts(coverage);
  coverage->add_option("--ks", cov_ks, "Cutoffs")->delimiter(',')->capture_default_str();

  auto* pathcounts = analyze->add_subcommand("pathcounts", "Walk counts for one user (item,count)");
  pathcounts->alias("dump-pathcounts");
  std::uint32_t pc_user = 0;
  unsigned pc_h = 6;
  double pc_cap = 1e6;
  std::string pc_out;
  pathcounts->add_option("--dataset", an_ds, "Prepared dataset directory")->required();
  pathcounts->add_option("--user", pc_user, "User id")->required();
  pathcounts->add_option("--horizon", pc_h, "Walk horizon")->capture_default_str();
  pathcounts->add_option("--cap", pc_cap, "Per-item count cap")->capture_default_str();
  pathcounts->add_option("--out", pc_out, "CSV path (default stdout)");

  auto* sweep = analyze->add_subcommand("sweep", "Train once per value of one parameter");
  std::string sw_param, sw_values;
  sweep->add_option("--dataset", an_ds, "Prepared dataset directory")->required();
  sweep->add_option("--config", an_cfg, "Base config file");
  sweep->add_option("--set", an_set, "key=value override (repeatable)");
  sweep->add_option("--param", sw_param, "Config key to vary, e.g. a or b")->required();
  sweep->add_option("--values", sw_values, "Comma-separated values")->required();
  sweep->add_option("--out-dir", an_out, "Output directory")->required();

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients");
  std::uint64_t gc_seed = 0;
  std::size_t gc_seeds = 20;
  std::vector<std::size_t> gc_dims{4, 8}, gc_layers{1, 2}, gc_sizes{2, 4};
  double gc_tol = 1e-4;
  gradcheck->add_option("--seed", gc_seed, "First seed")->capture_default_str();
  gradcheck->add_option("--seeds", gc_seeds, "Seeds per shape")->capture_default_str();
  gradcheck->add_option("--dims", gc_dims, "Latent dims")->delimiter(',')->capture_default_str();
  gradcheck->add_option("--layers", gc_layers, "Layer counts")->delimiter(',')->capture_default_str();
  gradcheck->add_option("--neighbor-sizes", gc_sizes, "Neighbour sizes")
      ->delimiter(',')
      ->capture_default_str();
  gradcheck->add_option("--tolerance", gc_tol, "Max relative error")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : KGPL_USAGE_ERROR;
  }

  try {
    check(kgpl_set_log_level(log_level.c_str()));

    if (*prepare) {
      kgpl_dataset_stats s{};
      check(kgpl_prepare(kind.c_str(), resolve(raw_path).c_str(), resolve(kg_path).c_str(),
                         item_map.empty() ? nullptr : resolve(item_map).c_str(), prep_out.c_str(),
                         prep_seed, &s));
      std::printf("users %llu items %llu interactions %llu (train %llu valid %llu test %llu)\n",
                  (unsigned long long)s.users, (unsigned long long)s.items,
                  (unsigned long long)s.interactions, (unsigned long long)s.train,
                  (unsigned long long)s.valid, (unsigned long long)s.test);
      std::printf("entities %llu relations %llu triples %llu\n", (unsigned long long)s.entities,
                  (unsigned long long)s.relations, (unsigned long long)s.triples);
      return 0;
    }

    if (*train) {
      DatasetPtr ds;
      open_dataset(train_ds, ds);
      ConfigPtr cfg;
      build_config(train_cfg, train_set, cfg);
      if (!variant.empty()) check(kgpl_config_set(cfg.p, "variant", variant.c_str()));
      if (train_workers) {
        check(kgpl_config_set(cfg.p, "workers", std::to_string(train_workers).c_str()));
      }
      if (!train_candidates.empty()) {
        check(kgpl_config_set(cfg.p, "candidate_set", train_candidates.c_str()));
      }
      kgpl_train_result* result = nullptr;
      check(kgpl_train(ds.p, cfg.p, train_out.c_str(), dry_run ? 1 : 0, &result));
      std::unique_ptr<kgpl_train_result, void (*)(kgpl_train_result*)> guard(
          result, kgpl_train_result_free);
      if (dry_run) {
        std::printf("dry run: %llu step\n", (unsigned long long)kgpl_train_result_steps(result));
        return 0;
      }
      std::printf("best valid R@10 %.6f at step %llu (grid point %zu)\n",
                  kgpl_train_result_best_valid_recall(result),
                  (unsigned long long)kgpl_train_result_best_step(result),
                  kgpl_train_result_best_index(result));
      double p10 = 0.0, r10 = 0.0;
      if (kgpl_train_result_test_metric(result, "precision", 10, &p10) == KGPL_OK &&
          kgpl_train_result_test_metric(result, "recall", 10, &r10) == KGPL_OK) {
        std::printf("test P@10 %.6f R@10 %.6f\n", p10, r10);
      }
      return 0;
    }

    if (*evaluate) {
      DatasetPtr ds;
      open_dataset(eval_ds, ds);
      const auto systems = load_systems(ds.p, eval_systems, eval_cfg, eval_set);
      const auto reports = evaluate_all(ds.p, systems, eval_ks, eval_split, eval_candidates,
                                        eval_workers, false);
      fs::create_directories(eval_out);
      const auto ptrs = raw(reports);
      check(kgpl_write_metrics_csv((fs::path(eval_out) / "metrics.csv").c_str(), ptrs.data(),
                                   ptrs.size()));
      for (const auto* r : ptrs) {
        double p = 0.0, rc = 0.0;
        check(kgpl_eval_report_metric(r, "precision", eval_ks.front(), &p));
        check(kgpl_eval_report_metric(r, "recall", eval_ks.front(), &rc));
        std::printf("P@%llu %.6f R@%llu %.6f over %zu users\n",
                    (unsigned long long)eval_ks.front(), p, (unsigned long long)eval_ks.front(),
                    rc, kgpl_eval_report_num_users(r));
      }
      return 0;
    }

    if (*analyze) {
      DatasetPtr ds;
      open_dataset(an_ds, ds);
      if (*pathcounts) {
        std::string out = pc_out.empty() ? "/dev/stdout" : pc_out;
        check(kgpl_dump_pathcounts(ds.p, pc_user, pc_h, pc_cap, out.c_str()));
        return 0;
      }
      if (*sweep) {
        ConfigPtr cfg;
        build_config(an_cfg, an_set, cfg);
        fs::create_directories(an_out);
        check(kgpl_sweep(ds.p, cfg.p, sw_param.c_str(), sw_values.c_str(), an_out.c_str(),
                         (fs::path(an_out) / "sweep.csv").c_str()));
        return 0;
      }
      const auto systems = load_systems(ds.p, an_systems, an_cfg, an_set);
      const bool lists = static_cast<bool>(*coverage);
      std::vector<uint64_t> ks = lists ? cov_ks : std::vector<uint64_t>{10};
      const auto reports = evaluate_all(ds.p, systems, ks, "test", "full", an_workers, lists);
      const auto ptrs = raw(reports);
      fs::create_directories(an_out);
      const fs::path dir(an_out);
      if (*groups) {
        check(kgpl_write_groups_csv((dir / "groups.csv").c_str(), ptrs.data(), ptrs.size()));
      } else if (*winners) {
        check(kgpl_write_winners_csv((dir / "winners.csv").c_str(), ptrs.data(), ptrs.size()));
      } else {
        check(kgpl_write_coverage_csv((dir / "coverage.csv").c_str(), ds.p, ptrs.data(),
                                      ptrs.size(), cov_ks.data(), cov_ks.size()));
      }
      return 0;
    }

    if (*gradcheck) {
      bool all = true;
      double worst = 0.0;
      std::size_t runs = 0;
      for (std::size_t d : gc_dims)
        for (std::size_t l : gc_layers)
          for (std::size_t s : gc_sizes)
            for (std::size_t k = 0; k < gc_seeds; ++k) {
              kgpl_gradcheck_result r{};
              check(kgpl_gradcheck(gc_seed + k, d, l, s, gc_tol, &r));
              ++runs;
              worst = std::max(worst, r.max_relative_error);
              if (!r.passed) {
                all = false;
                std::printf("FAIL seed=%llu d=%zu L=%zu S=%zu rel=%.3e\n",
                            (unsigned long long)(gc_seed + k), d, l, s, r.max_relative_error);
              }
            }
      std::printf("%s: %zu runs, max relative error %.3e (tolerance %.1e)\n",
                  all ? "PASS" : "FAIL", runs, worst, gc_tol);
      return all ? 0 : KGPL_NUMERIC_ERROR;
    }
  } catch (const Failure& f) {
    const char* msg = kgpl_last_error();
    if (msg && *msg) std::fprintf(stderr, "error: %s\n", msg);
    return static_cast<int>(f.status);
  }
  return 0;
}
