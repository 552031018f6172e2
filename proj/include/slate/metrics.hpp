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
#include <iosfwd>
#include <span>
#include <vector>

#include "slate/data.hpp"
#include "slate/model.hpp"

namespace slate {

struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> labels;  // +1 / -1
};

// Mean over positives i of
//   #{j : score_j >= score_i, y_j = +1} / #{j : score_j >= score_i}.
// Ties count as "no less than", so tied groups share a single ratio.
double average_precision(const ScoredSet& s);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

// One point per distinct score threshold, in increasing recall.
std::vector<PrPoint> pr_curve(const ScoredSet& s);
// Two-column CSV with a `recall,precision` header.
void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& curve);

// sum_n ||x_n - mean(x)||^2
double consensus_error(const std::vector<std::vector<double>>& params);

struct EvalResult {
  double ap = 0.0;
  std::size_t n_pos = 0;
  std::size_t n = 0;
};

ScoredSet score_dataset(const ModelParams& p, const Dataset& ds);
EvalResult evaluate(const ModelParams& p, const Dataset& test);

}  // namespace slate
