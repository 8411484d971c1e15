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

#include "kgpl/optimizer.hpp"

#include <cmath>

namespace kgpl {

AdamState AdamState::zeros(const ModelDims& dims) {
  return {ModelParams::zeros(dims), ModelParams::zeros(dims), 0};
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               const AdamOptions& options) {
  if (!(grads.dims == params.dims)) throw UsageError("gradient shape mismatch");
  if (!(state.first.dims == params.dims)) state = AdamState::zeros(params.dims);

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);

  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.first.tensors();
  auto v = state.second.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto pf = p[k]->flat();
    const auto gf = g[k]->flat();
    auto mf = m[k]->flat();
    auto vf = v[k]->flat();
    for (std::size_t i = 0; i < pf.size(); ++i) {
      mf[i] = options.beta1 * mf[i] + (1.0 - options.beta1) * gf[i];
      vf[i] = options.beta2 * vf[i] + (1.0 - options.beta2) * gf[i] * gf[i];
      const double m_hat = mf[i] / correction1;
      const double v_hat = vf[i] / correction2;
      pf[i] -= lr * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

}  // namespace kgpl
