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

/* C interface to the KGPL recommender. All handles are opaque; every
 * function returning kgpl_status leaves a message for kgpl_last_error() on
 * failure. Status values double as process exit codes. */

#ifndef KGPL_KGPL_H_
#define KGPL_KGPL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(KGPL_BUILDING_LIBRARY)
#define KGPL_API __attribute__((visibility("default")))
#else
#define KGPL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kgpl_status {
  KGPL_OK = 0,
  KGPL_USAGE_ERROR = 1,
  KGPL_DATA_ERROR = 2,
  KGPL_NUMERIC_ERROR = 3,
  KGPL_INTERNAL_ERROR = 4
} kgpl_status;

/* Message of the last failure on this thread ("" if none). */
KGPL_API const char* kgpl_last_error(void);
KGPL_API const char* kgpl_version(void);
/* trace, debug, info, warn, error, off */
KGPL_API kgpl_status kgpl_set_log_level(const char* level);

/* ---- datasets ---------------------------------------------------------- */

typedef struct kgpl_dataset kgpl_dataset;

typedef struct kgpl_dataset_stats {
  uint64_t users, items, interactions;
  uint64_t train, valid, test, valid_neg, test_neg;
  uint64_t entities, relations, triples;
} kgpl_dataset_stats;

/* kind: movielens1m | lastfm | bookcrossing | generic-tsv. item_map may be NULL.
 * stats may be NULL. */
KGPL_API kgpl_status kgpl_prepare(const char* kind, const char* raw_path, const char* kg_path,
                                  const char* item_map_path, const char* out_dir, uint64_t seed,
                                  kgpl_dataset_stats* stats);
KGPL_API kgpl_status kgpl_dataset_open(const char* dir, kgpl_dataset** out);
KGPL_API kgpl_status kgpl_dataset_stats_get(const kgpl_dataset* ds, kgpl_dataset_stats* out);
KGPL_API void kgpl_dataset_free(kgpl_dataset* ds);

/* ---- configuration ----------------------------------------------------- */

/* A flat key = value configuration; comma-separated values form grid axes. */
typedef struct kgpl_config kgpl_config;

KGPL_API kgpl_status kgpl_config_create(kgpl_config** out);
KGPL_API kgpl_status kgpl_config_load(const char* path, kgpl_config** out);
KGPL_API kgpl_status kgpl_config_set(kgpl_config* cfg, const char* key, const char* values);
/* Writes the NUL-terminated value(s) of key, comma-joined, into buf. Returns
 * KGPL_USAGE_ERROR when buf is too small. */
KGPL_API kgpl_status kgpl_config_get(const kgpl_config* cfg, const char* key, char* buf,
                                     size_t buflen);
KGPL_API size_t kgpl_config_grid_size(const kgpl_config* cfg);
KGPL_API void kgpl_config_free(kgpl_config* cfg);

/* ---- training ---------------------------------------------------------- */

typedef struct kgpl_train_result kgpl_train_result;

/* Trains every grid point of cfg and keeps the best by validation R@10.
 * out_dir may be NULL (nothing written). dry_run: one batch, one update. */
KGPL_API kgpl_status kgpl_train(const kgpl_dataset* ds, const kgpl_config* cfg,
                                const char* out_dir, int dry_run, kgpl_train_result** out);
KGPL_API double kgpl_train_result_best_valid_recall(const kgpl_train_result* r);
KGPL_API uint64_t kgpl_train_result_steps(const kgpl_train_result* r);
KGPL_API uint64_t kgpl_train_result_best_step(const kgpl_train_result* r);
KGPL_API size_t kgpl_train_result_curve_length(const kgpl_train_result* r);
/* Validation R@10 of f at curve point i. */
KGPL_API double kgpl_train_result_curve_recall(const kgpl_train_result* r, size_t i);
/* metric: "precision" or "recall"; fails when no test evaluation ran. */
KGPL_API kgpl_status kgpl_train_result_test_metric(const kgpl_train_result* r, const char* metric,
                                                   uint64_t k, double* out);
KGPL_API size_t kgpl_train_result_best_index(const kgpl_train_result* r);
KGPL_API void kgpl_train_result_free(kgpl_train_result* r);

/* ---- systems and evaluation -------------------------------------------- */

typedef struct kgpl_system kgpl_system;

KGPL_API kgpl_status kgpl_system_top_popular(const kgpl_dataset* ds, kgpl_system** out);
/* Loads a checkpoint; cfg (may be NULL) supplies neighbor_size and data_seed
 * so the neighbourhoods match training. */
KGPL_API kgpl_status kgpl_system_from_checkpoint(const kgpl_dataset* ds, const char* path,
                                                 const kgpl_config* cfg, const char* name,
                                                 kgpl_system** out);
/* Writes one score per catalog item (n must equal the item count). */
KGPL_API kgpl_status kgpl_system_score(const kgpl_system* sys, uint32_t user, double* out,
                                       size_t n);
KGPL_API void kgpl_system_free(kgpl_system* sys);

typedef struct kgpl_eval_options {
  const char* split;          /* "valid" | "test"; NULL = test */
  const char* candidate_set;  /* "full" | "sampled"; NULL = full */
  const uint64_t* ks;         /* NULL = {10, 20, 50, 100} */
  size_t num_ks;
  size_t workers;             /* 0 = 1 */
  int keep_lists;             /* needed for coverage */
} kgpl_eval_options;

typedef struct kgpl_eval_report kgpl_eval_report;

KGPL_API kgpl_status kgpl_evaluate(const kgpl_dataset* ds, const kgpl_system* sys,
                                   const kgpl_eval_options* options, kgpl_eval_report** out);
KGPL_API kgpl_status kgpl_eval_report_metric(const kgpl_eval_report* r, const char* metric,
                                             uint64_t k, double* out);
KGPL_API size_t kgpl_eval_report_num_users(const kgpl_eval_report* r);
KGPL_API void kgpl_eval_report_free(kgpl_eval_report* r);

/* ---- reports and analyses ---------------------------------------------- */

KGPL_API kgpl_status kgpl_write_metrics_csv(const char* path,
                                            const kgpl_eval_report* const* reports, size_t n);
/* Cumulative sparsity groups at the 25/50/75/100th percentiles (R@10). */
KGPL_API kgpl_status kgpl_write_groups_csv(const char* path,
                                           const kgpl_eval_report* const* reports, size_t n);
KGPL_API kgpl_status kgpl_write_winners_csv(const char* path,
                                            const kgpl_eval_report* const* reports, size_t n);
KGPL_API kgpl_status kgpl_write_coverage_csv(const char* path, const kgpl_dataset* ds,
                                             const kgpl_eval_report* const* reports, size_t n,
                                             const uint64_t* ks, size_t num_ks);
/* "item,count" rows of the capped walk counts for one user. */
KGPL_API kgpl_status kgpl_dump_pathcounts(const kgpl_dataset* ds, uint32_t user, unsigned horizon,
                                          double cap, const char* path);
/* Trains cfg once per value (comma-separated) of parameter. */
KGPL_API kgpl_status kgpl_sweep(const kgpl_dataset* ds, const kgpl_config* cfg,
                                const char* parameter, const char* values, const char* out_dir,
                                const char* csv_path);

/* ---- diagnostics ------------------------------------------------------- */

typedef struct kgpl_gradcheck_result {
  double max_relative_error;
  int passed;
} kgpl_gradcheck_result;

KGPL_API kgpl_status kgpl_gradcheck(uint64_t seed, size_t dim, size_t layers,
                                    size_t neighbor_size, double tolerance,
                                    kgpl_gradcheck_result* out);

#ifdef __cplusplus
}
#endif

#endif /* KGPL_KGPL_H_ */
