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

#ifndef KGPL_OPTIMIZER_HPP_
#define KGPL_OPTIMIZER_HPP_

#include <cstdint>

#include "kgpl/model.hpp"

namespace kgpl {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment estimates, shaped like the parameters.
struct AdamState {
  ModelParams first;
  ModelParams second;
  std::uint64_t step = 0;

  static AdamState zeros(const ModelDims& dims);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected adaptive-moment update over every parameter.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               const AdamOptions& options = {});

}  // namespace kgpl

#endif  // KGPL_OPTIMIZER_HPP_
