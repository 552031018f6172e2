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
#include <string>
#include <vector>

namespace slate {

// Symmetric, nonnegative, doubly stochastic N x N gossip matrix. Instances are
// validated on construction and immutable afterwards.
class MixingMatrix {
 public:
  // Row-major entries; throws ValidationError naming the first bad row.
  MixingMatrix(std::size_t n, std::vector<double> entries,
               double tolerance = 1e-12);

  std::size_t n() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return w_[i * n_ + j];
  }
  const std::vector<double>& entries() const { return w_; }

  bool operator==(const MixingMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<double> w_;
};

// Circulant ring with weight 1/3 on self and both neighbours. n < 3 falls
// back to complete(n).
MixingMatrix ring(std::size_t n);
// Exact averaging J = (1/n) 1 1^T.
MixingMatrix complete(std::size_t n);
MixingMatrix identity(std::size_t n);

// n rows of n whitespace-separated decimals. Symmetry and row sums are
// checked to 1e-9.
MixingMatrix read_matrix(std::istream& in);
MixingMatrix from_file(const std::string& path);
void write_matrix(std::ostream& out, const MixingMatrix& w);

// Either a fixed matrix, or federated averaging: identity rounds with a full
// average whenever (t + 1) is a multiple of q.
class TopologySchedule {
 public:
  static TopologySchedule fixed(MixingMatrix w);
  static TopologySchedule federated(std::size_t n, std::size_t period_q);

  std::size_t n() const { return n_; }
  bool is_federated() const { return federated_; }
  std::size_t period() const { return q_; }

  const MixingMatrix& at(std::size_t t) const;

 private:
  TopologySchedule(std::size_t n, bool federated, std::size_t q,
                   std::vector<MixingMatrix> mats);

  std::size_t n_;
  bool federated_;
  std::size_t q_;
  std::vector<MixingMatrix> mats_;  // fixed: {W}; federated: {I, J}
};

const MixingMatrix& schedule_at(const TopologySchedule& s, std::size_t t);

// lambda = ||W - J||_2 by power iteration on (W - J)^T (W - J).
double spectral_gap(const MixingMatrix& w, double rel_tol = 1e-10,
                    std::size_t max_iter = 10000);

// out_i = sum_r w_ir * in_r, summed in r order.
std::vector<std::vector<double>> mix(
    const MixingMatrix& w, const std::vector<std::vector<double>>& vectors);
// Single-row variant used by the optimizers' parallel consensus step.
void mix_row(const MixingMatrix& w, std::size_t row,
             const std::vector<const std::vector<double>*>& vectors,
             std::vector<double>& out);

}  // namespace slate
