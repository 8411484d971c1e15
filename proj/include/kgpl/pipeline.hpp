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

#ifndef KGPL_PIPELINE_HPP_
#define KGPL_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "kgpl/data.hpp"
#include "kgpl/kg_store.hpp"

namespace kgpl {

enum class DatasetKind { kGenericTsv, kMovieLens1M, kLastFm, kBookCrossing };

DatasetKind parse_dataset_kind(const std::string& s);
const char* dataset_kind_name(DatasetKind kind);

// Raw logs to canonical pairs.
//   generic-tsv   "user item [label]" with 0-based ids used as-is
//   movielens1m   "UserID::MovieID::Rating::Timestamp"
//   lastfm        "userID<TAB>artistID<TAB>weight" with a header line
//   bookcrossing  "\"User-ID\";\"ISBN\";\"Book-Rating\"" with a header line
// `item_map` ("raw_id<TAB>item_id" lines) assigns item ids and drops unmapped
// items; without it items are numbered densely in raw-id order. Users of the
// non-generic kinds are always numbered densely in raw-id order.
RawInteractions convert_raw(DatasetKind kind, const std::filesystem::path& raw,
                            const std::filesystem::path& item_map = {});

struct PrepareOptions {
  DatasetKind kind = DatasetKind::kGenericTsv;
  std::filesystem::path raw;
  std::filesystem::path kg;
  std::filesystem::path item_map;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  SplitRatios ratios;
};

struct DatasetStats {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
  std::size_t valid_neg = 0;
  std::size_t test_neg = 0;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t triples = 0;
  std::size_t short_negative_users = 0;
};

struct Dataset {
  std::filesystem::path dir;
  std::uint64_t seed = 0;
  RawInteractions raw;
  InteractionData data;
  KnowledgeGraph kg;
  DatasetStats stats() const;
};

// Splits, draws evaluation negatives and writes the dataset directory.
Dataset build_dataset(RawInteractions raw, KnowledgeGraph kg, std::uint64_t seed,
                      const SplitRatios& ratios = {});

// interactions.tsv, train/valid/test.tsv, valid_neg/test_neg.tsv, kg.txt and
// manifest.json. The manifest timestamp honours SOURCE_DATE_EPOCH.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                   const std::map<std::string, std::string>& provenance = {});

Dataset prepare_dataset(const PrepareOptions& options);

// Reads a directory written by write_dataset; warns when a file hash differs
// from the manifest.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace kgpl

#endif  // KGPL_PIPELINE_HPP_
