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

#ifndef KGPL_SAMPLING_DISTRIBUTION_HPP_
#define KGPL_SAMPLING_DISTRIBUTION_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "kgpl/rng.hpp"
#include "kgpl/types.hpp"

namespace kgpl {

// Normalized categorical distribution over item ids with O(1) draws
// (Walker/Vose alias table).
class SamplingDistribution {
 public:
  SamplingDistribution() = default;

  // `support` must be sorted and unique; weights non-negative with a
  // positive sum.
  static SamplingDistribution from_weights(std::vector<ItemId> support,
                                           const std::vector<double>& weights);

  std::size_t size() const noexcept { return support_.size(); }
  bool empty() const noexcept { return support_.empty(); }
  std::span<const ItemId> support() const noexcept { return support_; }
  std::span<const double> probabilities() const noexcept { return prob_; }

  // Zero for items outside the support.
  double probability_of(ItemId item) const;

  ItemId draw(Rng& rng) const;

 private:
  std::vector<ItemId> support_;
  std::vector<double> prob_;
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace kgpl

#endif  // KGPL_SAMPLING_DISTRIBUTION_HPP_
