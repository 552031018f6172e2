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
#include <cstdint>
#include <span>
#include <vector>

#include "slate/data.hpp"
#include "slate/executor.hpp"
#include "slate/model.hpp"
#include "slate/rng.hpp"
#include "slate/surrogate.hpp"
#include "slate/topology.hpp"

namespace slate {

// Node-local data with its positive subset precomputed.
struct Shard {
  Dataset data;
  std::vector<std::size_t> positives;  // indices into data
};

std::vector<Shard> make_shards(const Dataset& ds, const Partition& part);
Shard make_shard(Dataset data);

struct NodeState {
  ModelParams x;
  std::vector<double> u;       // gradient estimator, current round
  std::vector<double> v;       // gradient tracker
  std::vector<double> u_prev;  // estimator of the previous round
  std::vector<double> x_prev;  // parameters of the previous round (SLATE-M)
};

struct SlateConfig {
  double eta = 0.01;
  std::size_t b = 3;   // positive anchors per node and round
  std::size_t m = 20;  // inner batch per node and round
  SurrogateConfig surrogate;
  bool gradient_tracking = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SlateMConfig : SlateConfig {
  double alpha = 0.1;          // momentum coefficient, (0, 1]
  std::size_t init_batch = 3;  // B, anchors for the initial estimator

  void validate() const;
};

// Indices into one node's shard.
struct NodeBatch {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> inner;
};

// Positives without replacement unless b exceeds the shard's positives; same
// rule for the inner batch against the shard size.
NodeBatch draw_batches(const Shard& shard, std::size_t node, std::size_t round,
                       std::size_t b, std::size_t m,
                       const StreamFactory& streams);

struct RoundStats {
  std::size_t clamp_events = 0;
};

// Shared Xavier initialisation on every node, zero u / v.
std::vector<NodeState> slate_init(const ModelSpec& spec, std::size_t n_nodes,
                                  const SlateConfig& cfg);

// One SLATE round in place: estimator, optional tracking, then
// x <- W (x - eta v).
RoundStats slate_round(std::vector<NodeState>& states,
                       const std::vector<Shard>& shards, const MixingMatrix& w,
                       const SlateConfig& cfg, const StreamFactory& streams,
                       std::size_t round, Executor* exec = nullptr);

// Large-batch estimator at x0 (round 0 streams), then the first consensus
// step, so the returned states hold x1.
std::vector<NodeState> slatem_init(const ModelSpec& spec,
                                   const std::vector<Shard>& shards,
                                   const MixingMatrix& w,
                                   const SlateMConfig& cfg,
                                   const StreamFactory& streams,
                                   Executor* exec = nullptr,
                                   RoundStats* stats = nullptr);

// STORM-style estimator u = g(x_t) + (1 - alpha)(u_prev - g(x_{t-1})), both
// gradients on the same batches. Rounds start at 1.
RoundStats slatem_round(std::vector<NodeState>& states,
                        const std::vector<Shard>& shards,
                        const MixingMatrix& w, const SlateMConfig& cfg,
                        const StreamFactory& streams, std::size_t round,
                        Executor* exec = nullptr);

// Mean binary cross-entropy of sigmoid scores and its gradient.
double bce_loss(const ModelParams& p, const Dataset& ds,
                std::span<const std::size_t> batch);
std::vector<double> bce_grad(const ModelParams& p, const Dataset& ds,
                             std::span<const std::size_t> batch);

// D-PSGD: local SGD step on BCE, then x <- W x.
void dpsgd_round(std::vector<NodeState>& states,
                 const std::vector<Shard>& shards, const MixingMatrix& w,
                 double step_size, std::size_t batch,
                 const StreamFactory& streams, std::size_t round,
                 Executor* exec = nullptr);

ModelParams mean_params(const std::vector<NodeState>& states);
std::vector<double> mean_vector(const std::vector<std::vector<double>>& vs);

}  // namespace slate
