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

#include "slate/surrogate.hpp"

#include <algorithm>
#include <numeric>

#include "slate/error.hpp"

namespace slate {
namespace {

struct AnchorTerms {
  InnerEstimate est;
  std::size_t m_eff = 0;
};

// g1/g2 for an anchor from precomputed scores.
AnchorTerms anchor_terms(double h_anchor, std::span<const double> h_inner,
                         std::span<const int> y_inner,
                         const SurrogateConfig& cfg) {
  double sum_pos = 0.0;
  double sum_all = 0.0;
  std::size_t m_eff = h_inner.size();
  if (cfg.include_anchor) {
    const double self = pair_loss(h_anchor, h_anchor, cfg.margin);
    sum_pos += self;
    sum_all += self;
    ++m_eff;
  }
  for (std::size_t j = 0; j < h_inner.size(); ++j) {
    const double l = pair_loss(h_anchor, h_inner[j], cfg.margin);
    if (y_inner[j] > 0) sum_pos += l;
    sum_all += l;
  }
  AnchorTerms t;
  t.m_eff = m_eff;
  const double m = static_cast<double>(m_eff);
  t.est.g1 = sum_pos / m;
  t.est.g2 = sum_all / m;
  if (t.est.g2 < cfg.g2_floor) {
    t.est.g2 = cfg.g2_floor;
    t.est.clamped = true;
  }
  return t;
}

struct Evaluation {
  double objective = 0.0;
  std::vector<double> grad;
  std::size_t clamp_events = 0;
};

Evaluation evaluate(const ModelParams& p, const Dataset& ds,
                    std::span<const std::size_t> pos_batch,
                    std::span<const std::size_t> inner_batch,
                    const SurrogateConfig& cfg, bool want_grad) {
  cfg.validate();
  if (pos_batch.empty()) throw ContractError("positive batch is empty");
  if (inner_batch.empty() && !cfg.include_anchor)
    throw ContractError("inner batch is empty");

  const std::size_t b = pos_batch.size();
  const std::size_t m = inner_batch.size();
  std::vector<double> h_inner(m);
  std::vector<int> y_inner(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Sample& s = ds.samples.at(inner_batch[j]);
    h_inner[j] = score(p, s.features);
    y_inner[j] = s.label;
  }
  std::vector<double> h_anchor(b);
  for (std::size_t a = 0; a < b; ++a) {
    const Sample& s = ds.samples.at(pos_batch[a]);
    if (!s.positive())
      throw ContractError("anchor sample is not a positive example");
    h_anchor[a] = score(p, s.features);
  }

  // dF/dh per batch position; the gradient is then sum_k w_k * dh_k/dtheta.
  std::vector<double> w_inner(want_grad ? m : 0, 0.0);
  std::vector<double> w_anchor(want_grad ? b : 0, 0.0);
  Evaluation ev;
  double total = 0.0;
  for (std::size_t a = 0; a < b; ++a) {
    const AnchorTerms t = anchor_terms(h_anchor[a], h_inner, y_inner, cfg);
    if (t.est.clamped) ++ev.clamp_events;
    total += surrogate_value(t.est);
    if (!want_grad) continue;

    const double g1 = t.est.g1;
    const double g2 = t.est.g2;
    const double scale = 1.0 / (static_cast<double>(b) *
                                static_cast<double>(t.m_eff) * g2 * g2);
    for (std::size_t j = 0; j < m; ++j) {
      if (inner_batch[j] == pos_batch[a]) continue;  // self-pair, zero gradient
      const double hinge =
          std::max(cfg.margin - h_anchor[a] + h_inner[j], 0.0);
      if (hinge == 0.0) continue;
      const double coeff = g1 - (y_inner[j] > 0 ? g2 : 0.0);
      const double c = scale * coeff * 2.0 * hinge;
      w_inner[j] += c;
      w_anchor[a] -= c;
    }
  }
  ev.objective = total / static_cast<double>(b);
  if (!want_grad) return ev;

  ev.grad.assign(p.theta.size(), 0.0);
  std::vector<double> dh(p.theta.size());
  auto accumulate = [&](const Sample& s, double w) {
    if (w == 0.0) return;
    score_and_grad(p, s.features, dh);
    for (std::size_t k = 0; k < dh.size(); ++k) ev.grad[k] += w * dh[k];
  };
  for (std::size_t j = 0; j < m; ++j)
    accumulate(ds.samples[inner_batch[j]], w_inner[j]);
  for (std::size_t a = 0; a < b; ++a)
    accumulate(ds.samples[pos_batch[a]], w_anchor[a]);
  return ev;
}

std::vector<std::size_t> all_indices(const Dataset& ds) {
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

void SurrogateConfig::validate() const {
  if (!(margin > 0.0)) throw ContractError("surrogate margin must be > 0");
  if (!(g2_floor > 0.0 && g2_floor <= margin * margin))
    throw ContractError("g2_floor must lie in (0, margin^2]");
}

double pair_loss(double h_anchor, double h_other, double s) {
  const double hinge = std::max(s - h_anchor + h_other, 0.0);
  return hinge * hinge;
}

InnerEstimate inner_estimates(const ModelParams& p, const Sample& anchor,
                              std::span<const Sample> inner,
                              const SurrogateConfig& cfg) {
  cfg.validate();
  if (!anchor.positive())
    throw ContractError("anchor sample is not a positive example");
  if (inner.empty() && !cfg.include_anchor)
    throw ContractError("inner batch is empty");
  std::vector<double> h(inner.size());
  std::vector<int> y(inner.size());
  for (std::size_t j = 0; j < inner.size(); ++j) {
    h[j] = score(p, inner[j].features);
    y[j] = inner[j].label;
  }
  return anchor_terms(score(p, anchor.features), h, y, cfg).est;
}

double surrogate_value(const InnerEstimate& est) { return -est.g1 / est.g2; }

double batch_objective(const ModelParams& p, const Dataset& ds,
                       std::span<const std::size_t> pos_batch,
                       std::span<const std::size_t> inner_batch,
                       const SurrogateConfig& cfg) {
  return evaluate(p, ds, pos_batch, inner_batch, cfg, false).objective;
}

std::vector<double> biased_grad(const ModelParams& p, const Dataset& ds,
                                std::span<const std::size_t> pos_batch,
                                std::span<const std::size_t> inner_batch,
                                const SurrogateConfig& cfg,
                                std::size_t* clamp_events) {
  Evaluation ev = evaluate(p, ds, pos_batch, inner_batch, cfg, true);
  if (clamp_events) *clamp_events += ev.clamp_events;
  return std::move(ev.grad);
}

double full_objective(const ModelParams& p, const Dataset& ds,
                      const SurrogateConfig& cfg) {
  SurrogateConfig c = cfg;
  c.include_anchor = false;
  const auto pos = ds.positive_indices();
  if (pos.empty()) throw ContractError("dataset has no positive samples");
  return batch_objective(p, ds, pos, all_indices(ds), c);
}

std::vector<double> full_grad(const ModelParams& p, const Dataset& ds,
                              const SurrogateConfig& cfg) {
  SurrogateConfig c = cfg;
  c.include_anchor = false;
  const auto pos = ds.positive_indices();
  if (pos.empty()) throw ContractError("dataset has no positive samples");
  return biased_grad(p, ds, pos, all_indices(ds), c);
}

}  // namespace slate
