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

#ifndef KGPL_CONFIG_HPP_
#define KGPL_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kgpl/eval.hpp"

namespace kgpl {

enum class Variant { kNoPl, kRandSelf, kKaplSelf, kRandCot, kKaplCot };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& s);
bool uses_pseudo_labels(Variant v);
bool uses_cotraining(Variant v);
bool uses_kg_sampling(Variant v);

struct TrainConfig {
  double lr = 5e-3;
  std::size_t batch_size = 3333;  // rows; three per sampled user
  std::size_t epochs = 40;
  double dropout = 0.5;
  double a = 0.5;
  double b = 0.5;
  unsigned h = 6;
  std::size_t layers = 1;
  std::size_t dim = 64;
  std::size_t neighbor_size = 32;
  Variant variant = Variant::kKaplCot;
  bool uns = false;  // uniform negatives
  std::uint64_t data_seed = 0;
  std::uint64_t model_f_seed = 1;
  std::uint64_t model_g_seed = 2;
  std::uint64_t sampler_seed = 3;
  std::size_t eval_every = 0;  // steps; 0 = once per epoch
  std::size_t patience = 10;   // evaluations without improvement
  std::size_t warmup_epochs = 1;
  bool resample_neighbors = false;
  double path_cap = 1e6;
  std::size_t pseudo_per_positive = 1;
  std::size_t workers = 1;
  CandidateSet candidate_set = CandidateSet::kFull;

  std::size_t triples() const { return batch_size / 3; }
  // Throws UsageError naming the offending key.
  void validate() const;
  // Canonical key order, values in their shortest round-trip form.
  std::vector<std::pair<std::string, std::string>> to_pairs() const;
};

// Assigns one key; UsageError for unknown keys or unparsable values.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value);

std::vector<std::string> config_keys();

// A config whose keys may carry several comma-separated values.
class ConfigGrid {
 public:
  ConfigGrid() = default;

  // "key = value[, value...]" lines; '#' starts a comment.
  static ConfigGrid parse(const std::string& text, const std::string& origin = "<config>");
  static ConfigGrid load(const std::filesystem::path& path);

  // Replaces any earlier values of `key` (flags override file values).
  void set(const std::string& key, const std::string& values);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::vector<std::string>>& values() const { return values_; }

  // Cartesian product in canonical key order; later keys vary fastest.
  std::vector<TrainConfig> expand() const;
  std::size_t size() const;

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

std::string format_config(const TrainConfig& config);

}  // namespace kgpl

#endif  // KGPL_CONFIG_HPP_
