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

#ifndef KGPL_CHECKPOINT_HPP_
#define KGPL_CHECKPOINT_HPP_

#include <filesystem>
#include <optional>

#include "kgpl/optimizer.hpp"

namespace kgpl {

// Binary layout (little-endian):
//   "KGPL1"
//   u32 num_users, num_entities, num_relations (incl. self), dim, layers
//   f32 U, E, R, W_0..W_{L-1}           (row-major)
//   u64 optimizer step
//   f32 first moments, then second moments, same order and layout
struct Checkpoint {
  ModelParams params;
  AdamState optimizer;
};

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const AdamState& optimizer);

// Throws DataError on a bad magic, truncated file, or (when given)
// dimensions that differ from `expected`.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelDims>& expected = std::nullopt);

}  // namespace kgpl

#endif  // KGPL_CHECKPOINT_HPP_
