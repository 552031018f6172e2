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

#include "slate/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "slate/error.hpp"

namespace slate {
namespace {

void check(const ScoredSet& s) {
  if (s.scores.size() != s.labels.size())
    throw ContractError("scores and labels differ in length");
  if (std::none_of(s.labels.begin(), s.labels.end(),
                   [](int y) { return y > 0; }))
    throw ContractError("average precision needs at least one positive");
}

// Indices ordered by descending score.
std::vector<std::size_t> descending(const ScoredSet& s) {
  std::vector<std::size_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] > s.scores[b];
  });
  return order;
}

}  // namespace

double average_precision(const ScoredSet& s) {
  check(s);
  const auto order = descending(s);
  const std::size_t n = order.size();
  std::vector<double> precision(n, 0.0);
  std::size_t seen = 0;
  std::size_t seen_pos = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && s.scores[order[end]] == s.scores[order[start]]) {
      if (s.labels[order[end]] > 0) ++seen_pos;
      ++end;
    }
    seen += end - start;
    const double ratio =
        static_cast<double>(seen_pos) / static_cast<double>(seen);
    for (std::size_t k = start; k < end; ++k) precision[order[k]] = ratio;
    start = end;
  }
  // Summed in input order so the result is independent of the sort.
  double total = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.labels[i] > 0) {
      total += precision[i];
      ++positives;
    }
  }
  return total / static_cast<double>(positives);
}

std::vector<PrPoint> pr_curve(const ScoredSet& s) {
  check(s);
  const auto order = descending(s);
  const std::size_t n = order.size();
  const auto total_pos = static_cast<double>(std::count_if(
      s.labels.begin(), s.labels.end(), [](int y) { return y > 0; }));
  std::vector<PrPoint> curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && s.scores[order[end]] == s.scores[order[start]]) {
      if (s.labels[order[end]] > 0)
        ++tp;
      else
        ++fp;
      ++end;
    }
    curve.push_back({static_cast<double>(tp) / total_pos,
                     static_cast<double>(tp) / static_cast<double>(tp + fp)});
    start = end;
  }
  return curve;
}

void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& curve) {
  out << "recall,precision\n";
  for (const auto& pt : curve)
    out << fmt::format("{:.17g},{:.17g}\n", pt.recall, pt.precision);
}

double consensus_error(const std::vector<std::vector<double>>& params) {
  if (params.empty()) throw ContractError("consensus_error: no nodes");
  const auto& base = params[0];
  std::vector<double> offset(base.size(), 0.0);
  for (const auto& x : params) {
    if (x.size() != base.size())
      throw ContractError("consensus_error: shape mismatch");
    for (std::size_t k = 0; k < x.size(); ++k) offset[k] += x[k] - base[k];
  }
  const double n = static_cast<double>(params.size());
  for (auto& o : offset) o /= n;
  double err = 0.0;
  for (const auto& x : params)
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = (x[k] - base[k]) - offset[k];
      err += d * d;
    }
  return err;
}

ScoredSet score_dataset(const ModelParams& p, const Dataset& ds) {
  ScoredSet s;
  s.scores.reserve(ds.size());
  s.labels.reserve(ds.size());
  for (const auto& sample : ds.samples) {
    s.scores.push_back(score(p, sample.features));
    s.labels.push_back(sample.label);
  }
  return s;
}

EvalResult evaluate(const ModelParams& p, const Dataset& test) {
  if (test.dim != p.spec.input_dim)
    throw ContractError(fmt::format("model expects {} features, data has {}",
                                    p.spec.input_dim, test.dim));
  const ScoredSet s = score_dataset(p, test);
  EvalResult r;
  r.ap = average_precision(s);
  r.n = test.size();
  r.n_pos = test.positive_indices().size();
  return r;
}

}  // namespace slate
