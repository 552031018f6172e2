/*
 * Copyright 2026 The SLATE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slate/data.hpp"
#include "slate/model.hpp"

namespace slate {

// Squared-hinge pairwise AP surrogate settings.
struct SurrogateConfig {
  double margin = 0.1;       // s
  double g2_floor = 1e-12;   // lower clamp on the inner denominator
  bool include_anchor = true;  // anchor joins its own inner batch

  // Throws ContractError unless margin > 0 and 0 < g2_floor <= margin^2.
  void validate() const;
};

// Inner-batch averages for one positive anchor: g1 masks the pair losses by
// the other sample being positive, g2 does not.
struct InnerEstimate {
  double g1 = 0.0;
  double g2 = 0.0;
  bool clamped = false;  // g2 was raised to g2_floor
};

// (max{s - h_anchor + h_other, 0})^2
double pair_loss(double h_anchor, double h_other, double s);

// Anchor must be positive. With include_anchor the anchor is prepended, so
// the effective batch size is inner.size() + 1.
InnerEstimate inner_estimates(const ModelParams& p, const Sample& anchor,
                              std::span<const Sample> inner,
                              const SurrogateConfig& cfg);

// f(g) = -g1 / g2, in [-1, 0].
double surrogate_value(const InnerEstimate& est);

// Mean over anchors of surrogate_value; anchors are indices of positives in
// `ds`, and every anchor shares the same inner batch.
double batch_objective(const ModelParams& p, const Dataset& ds,
                       std::span<const std::size_t> pos_batch,
                       std::span<const std::size_t> inner_batch,
                       const SurrogateConfig& cfg);

// Gradient of batch_objective with the inner estimates held at their batch
// averages (the biased conditional-stochastic estimator). Counts g2 clamp
// events into *clamp_events when given.
std::vector<double> biased_grad(const ModelParams& p, const Dataset& ds,
                                std::span<const std::size_t> pos_batch,
                                std::span<const std::size_t> inner_batch,
                                const SurrogateConfig& cfg,
                                std::size_t* clamp_events = nullptr);

// Finite-sum surrogate over a whole dataset: every positive is an anchor and
// the inner batch is the entire dataset, with no extra anchor injection.
double full_objective(const ModelParams& p, const Dataset& ds,
                      const SurrogateConfig& cfg);
std::vector<double> full_grad(const ModelParams& p, const Dataset& ds,
                              const SurrogateConfig& cfg);

}  // namespace slate
