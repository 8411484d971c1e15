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

#include "kgpl/sampling_distribution.hpp"

#include <algorithm>
#include <cmath>

namespace kgpl {

SamplingDistribution SamplingDistribution::from_weights(std::vector<ItemId> support,
                                                        const std::vector<double>& weights) {
  if (support.size() != weights.size()) {
    throw UsageError("support and weights differ in length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw NumericError("invalid sampling weight");
    total += w;
  }
  if (!(total > 0.0)) throw NumericError("sampling weights sum to zero");

  SamplingDistribution d;
  const std::size_t n = support.size();
  d.support_ = std::move(support);
  d.prob_.resize(n);
  for (std::size_t k = 0; k < n; ++k) d.prob_[k] = weights[k] / total;

  // Vose's alias construction on probabilities scaled by n.
  d.accept_.assign(n, 1.0);
  d.alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    d.alias_[k] = static_cast<std::uint32_t>(k);
    scaled[k] = d.prob_[k] * static_cast<double>(n);
    (scaled[k] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(k));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    d.accept_[s] = scaled[s];
    d.alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto k : small) d.accept_[k] = 1.0;
  for (auto k : large) d.accept_[k] = 1.0;
  return d;
}

double SamplingDistribution::probability_of(ItemId item) const {
  const auto it = std::lower_bound(support_.begin(), support_.end(), item);
  if (it == support_.end() || *it != item) return 0.0;
  return prob_[static_cast<std::size_t>(it - support_.begin())];
}

ItemId SamplingDistribution::draw(Rng& rng) const {
  const auto column = rng.below(support_.size());
  const bool keep = rng.uniform() < accept_[column];
  return support_[keep ? column : alias_[column]];
}

}  // namespace kgpl
