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

#include "slate/optimizer.hpp"

#include <cmath>

#include <fmt/format.h>

#include "slate/error.hpp"

namespace slate {
namespace {

void run_nodes(Executor* exec, std::size_t n,
               const std::function<void(std::size_t)>& fn) {
  if (exec) {
    exec->for_each(n, fn);
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

void check_shapes(const std::vector<NodeState>& states,
                  const std::vector<Shard>& shards, const MixingMatrix& w) {
  if (states.size() != shards.size() || states.size() != w.n())
    throw ContractError(fmt::format(
        "round needs matching node counts: {} states, {} shards, {}x{} W",
        states.size(), shards.size(), w.n(), w.n()));
}

void check_positives(const std::vector<Shard>& shards) {
  for (std::size_t n = 0; n < shards.size(); ++n)
    if (shards[n].positives.empty())
      throw ContractError(fmt::format("shard {} has no positive samples", n));
}

// Gradient tracking (optional) followed by x <- W (x - eta v). `fresh_u`
// holds this round's estimators; the states still hold the previous ones.
void track_and_step(std::vector<NodeState>& states,
                    std::vector<std::vector<double>>& fresh_u,
                    const MixingMatrix& w, double eta, bool tracking,
                    Executor* exec) {
  const std::size_t n = states.size();
  std::vector<std::vector<double>> new_v(n);
  if (tracking) {
    std::vector<std::vector<double>> pre(n);
    run_nodes(exec, n, [&](std::size_t i) {
      const auto& st = states[i];
      pre[i].resize(st.v.size());
      for (std::size_t k = 0; k < st.v.size(); ++k)
        pre[i][k] = st.v[k] + fresh_u[i][k] - st.u[k];
    });
    std::vector<const std::vector<double>*> ptrs;
    for (const auto& p : pre) ptrs.push_back(&p);
    run_nodes(exec, n, [&](std::size_t i) { mix_row(w, i, ptrs, new_v[i]); });
  } else {
    for (std::size_t i = 0; i < n; ++i) new_v[i] = fresh_u[i];
  }

  std::vector<std::vector<double>> stepped(n);
  run_nodes(exec, n, [&](std::size_t i) {
    const auto& x = states[i].x.theta;
    stepped[i].resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
      stepped[i][k] = x[k] - eta * new_v[i][k];
  });
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& s : stepped) ptrs.push_back(&s);
  std::vector<std::vector<double>> new_x(n);
  run_nodes(exec, n, [&](std::size_t i) { mix_row(w, i, ptrs, new_x[i]); });

  for (std::size_t i = 0; i < n; ++i) {
    auto& st = states[i];
    st.x_prev = std::move(st.x.theta);
    st.x.theta = std::move(new_x[i]);
    st.u_prev = std::move(st.u);
    st.u = std::move(fresh_u[i]);
    st.v = std::move(new_v[i]);
  }
}

}  // namespace

Shard make_shard(Dataset data) {
  Shard s;
  s.positives = data.positive_indices();
  s.data = std::move(data);
  return s;
}

std::vector<Shard> make_shards(const Dataset& ds, const Partition& part) {
  std::vector<Shard> shards;
  shards.reserve(part.n_nodes());
  for (const auto& idx : part.shards) shards.push_back(make_shard(ds.subset(idx)));
  return shards;
}

void SlateConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw ConfigError("step size eta must be > 0");
  if (b < 1) throw ConfigError("positive batch size b must be >= 1");
  if (m < 1) throw ConfigError("inner batch size m must be >= 1");
  try {
    surrogate.validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

void SlateMConfig::validate() const {
  SlateConfig::validate();
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError("momentum alpha must lie in (0, 1]");
  if (init_batch < 1) throw ConfigError("initial batch size B must be >= 1");
}

NodeBatch draw_batches(const Shard& shard, std::size_t node, std::size_t round,
                       std::size_t b, std::size_t m,
                       const StreamFactory& streams) {
  if (shard.positives.empty())
    throw ContractError(fmt::format("shard {} has no positive samples", node));
  NodeBatch nb;
  RngStream pos_rng = streams.make(node, round, DrawKind::kPositiveBatch);
  for (std::size_t k : pos_rng.sample(shard.positives.size(), b))
    nb.pos.push_back(shard.positives[k]);
  RngStream inner_rng = streams.make(node, round, DrawKind::kInnerBatch);
  nb.inner = inner_rng.sample(shard.data.size(), m);
  return nb;
}

std::vector<NodeState> slate_init(const ModelSpec& spec, std::size_t n_nodes,
                                  const SlateConfig& cfg) {
  if (n_nodes < 1) throw ConfigError("need at least one node");
  const ModelParams x0 = init_params(spec, cfg.seed);
  NodeState proto;
  proto.x = x0;
  proto.u.assign(x0.theta.size(), 0.0);
  proto.v = proto.u;
  proto.u_prev = proto.u;
  proto.x_prev = x0.theta;
  return std::vector<NodeState>(n_nodes, proto);
}

RoundStats slate_round(std::vector<NodeState>& states,
                       const std::vector<Shard>& shards, const MixingMatrix& w,
                       const SlateConfig& cfg, const StreamFactory& streams,
                       std::size_t round, Executor* exec) {
  check_shapes(states, shards, w);
  check_positives(shards);
  const std::size_t n = states.size();
  std::vector<std::vector<double>> fresh(n);
  std::vector<std::size_t> clamps(n, 0);
  run_nodes(exec, n, [&](std::size_t i) {
    const NodeBatch nb = draw_batches(shards[i], i, round, cfg.b, cfg.m, streams);
    fresh[i] = biased_grad(states[i].x, shards[i].data, nb.pos, nb.inner,
                           cfg.surrogate, &clamps[i]);
  });
  track_and_step(states, fresh, w, cfg.eta, cfg.gradient_tracking, exec);
  RoundStats stats;
  for (std::size_t c : clamps) stats.clamp_events += c;
  return stats;
}

std::vector<NodeState> slatem_init(const ModelSpec& spec,
                                   const std::vector<Shard>& shards,
                                   const MixingMatrix& w,
                                   const SlateMConfig& cfg,
                                   const StreamFactory& streams,
                                   Executor* exec, RoundStats* stats) {
  auto states = slate_init(spec, shards.size(), cfg);
  check_shapes(states, shards, w);
  check_positives(shards);
  const std::size_t n = states.size();
  std::vector<std::vector<double>> u0(n);
  std::vector<std::size_t> clamps(n, 0);
  run_nodes(exec, n, [&](std::size_t i) {
    const NodeBatch nb =
        draw_batches(shards[i], i, 0, cfg.init_batch, cfg.m, streams);
    u0[i] = biased_grad(states[i].x, shards[i].data, nb.pos, nb.inner,
                        cfg.surrogate, &clamps[i]);
  });
  // With u = v = 0 beforehand, tracking gives v0 = W u0 and the step is
  // x1 = W (x0 - eta v0).
  track_and_step(states, u0, w, cfg.eta, cfg.gradient_tracking, exec);
  if (stats)
    for (std::size_t c : clamps) stats->clamp_events += c;
  return states;
}

RoundStats slatem_round(std::vector<NodeState>& states,
                        const std::vector<Shard>& shards,
                        const MixingMatrix& w, const SlateMConfig& cfg,
                        const StreamFactory& streams, std::size_t round,
                        Executor* exec) {
  check_shapes(states, shards, w);
  check_positives(shards);
  const std::size_t n = states.size();
  std::vector<std::vector<double>> fresh(n);
  std::vector<std::size_t> clamps(n, 0);
  const double keep = 1.0 - cfg.alpha;
  run_nodes(exec, n, [&](std::size_t i) {
    const auto& st = states[i];
    const NodeBatch nb = draw_batches(shards[i], i, round, cfg.b, cfg.m, streams);
    auto g_now = biased_grad(st.x, shards[i].data, nb.pos, nb.inner,
                             cfg.surrogate, &clamps[i]);
    if (cfg.alpha == 1.0) {
      fresh[i] = std::move(g_now);
      return;
    }
    ModelParams prev{st.x.spec, st.x_prev};
    const auto g_old = biased_grad(prev, shards[i].data, nb.pos, nb.inner,
                                   cfg.surrogate, &clamps[i]);
    fresh[i].resize(g_now.size());
    for (std::size_t k = 0; k < g_now.size(); ++k)
      fresh[i][k] = g_now[k] + keep * (st.u[k] - g_old[k]);
  });
  track_and_step(states, fresh, w, cfg.eta, cfg.gradient_tracking, exec);
  RoundStats stats;
  for (std::size_t c : clamps) stats.clamp_events += c;
  return stats;
}

double bce_loss(const ModelParams& p, const Dataset& ds,
                std::span<const std::size_t> batch) {
  if (batch.empty()) throw ContractError("bce_loss: empty batch");
  double total = 0.0;
  for (std::size_t i : batch) {
    const Sample& s = ds.samples.at(i);
    const double t = logit(p, s.features);
    // log(1 + e^t) - y t with y in {0, 1}
    const double softplus =
        t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    total += softplus - (s.positive() ? t : 0.0);
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> bce_grad(const ModelParams& p, const Dataset& ds,
                             std::span<const std::size_t> batch) {
  if (batch.empty()) throw ContractError("bce_grad: empty batch");
  std::vector<double> grad(p.theta.size(), 0.0);
  std::vector<double> dt(p.theta.size());
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i : batch) {
    const Sample& s = ds.samples.at(i);
    const double t = logit_and_grad(p, s.features, dt);
    const double r = (sigmoid(t) - (s.positive() ? 1.0 : 0.0)) * inv;
    for (std::size_t k = 0; k < dt.size(); ++k) grad[k] += r * dt[k];
  }
  return grad;
}

void dpsgd_round(std::vector<NodeState>& states,
                 const std::vector<Shard>& shards, const MixingMatrix& w,
                 double step_size, std::size_t batch,
                 const StreamFactory& streams, std::size_t round,
                 Executor* exec) {
  check_shapes(states, shards, w);
  if (batch < 1) throw ContractError("dpsgd: batch must be >= 1");
  const std::size_t n = states.size();
  std::vector<std::vector<double>> grads(n);
  std::vector<std::vector<double>> stepped(n);
  run_nodes(exec, n, [&](std::size_t i) {
    const Shard& sh = shards[i];
    if (sh.data.empty()) throw ContractError(fmt::format("shard {} is empty", i));
    RngStream rng = streams.make(i, round, DrawKind::kSgdBatch);
    const auto idx = rng.sample(sh.data.size(), batch);
    grads[i] = bce_grad(states[i].x, sh.data, idx);
    const auto& x = states[i].x.theta;
    stepped[i].resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
      stepped[i][k] = x[k] - step_size * grads[i][k];
  });
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& s : stepped) ptrs.push_back(&s);
  std::vector<std::vector<double>> new_x(n);
  run_nodes(exec, n, [&](std::size_t i) { mix_row(w, i, ptrs, new_x[i]); });
  for (std::size_t i = 0; i < n; ++i) {
    auto& st = states[i];
    st.x_prev = std::move(st.x.theta);
    st.x.theta = std::move(new_x[i]);
    st.u_prev = std::move(st.u);
    st.u = std::move(grads[i]);
    st.v = st.u;
  }
}

std::vector<double> mean_vector(const std::vector<std::vector<double>>& vs) {
  if (vs.empty()) throw ContractError("mean of zero vectors");
  // Accumulated as offsets from the first vector, so equal inputs give that
  // vector back exactly.
  const auto& base = vs[0];
  std::vector<double> acc(base.size(), 0.0);
  for (const auto& v : vs) {
    if (v.size() != base.size()) throw ContractError("mean: shape mismatch");
    for (std::size_t k = 0; k < v.size(); ++k) acc[k] += v[k] - base[k];
  }
  const double n = static_cast<double>(vs.size());
  std::vector<double> out(base.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = base[k] + acc[k] / n;
  return out;
}

ModelParams mean_params(const std::vector<NodeState>& states) {
  if (states.empty()) throw ContractError("mean_params: no nodes");
  std::vector<std::vector<double>> xs;
  xs.reserve(states.size());
  for (const auto& s : states) xs.push_back(s.x.theta);
  return ModelParams{states[0].x.spec, mean_vector(xs)};
}

}  // namespace slate
