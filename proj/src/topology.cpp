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

#include "slate/topology.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "slate/error.hpp"
#include "slate/rng.hpp"

namespace slate {

MixingMatrix::MixingMatrix(std::size_t n, std::vector<double> entries,
                           double tolerance)
    : n_(n), w_(std::move(entries)) {
  if (n_ == 0) throw ValidationError("matrix must have at least one row", 0);
  if (w_.size() != n_ * n_)
    throw ValidationError(
        fmt::format("expected {} entries, got {}", n_ * n_, w_.size()), 0);
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = w_[i * n_ + j];
      if (!std::isfinite(v) || v < 0.0)
        throw ValidationError(fmt::format("entry {} is negative", j + 1), i + 1);
      if (std::abs(v - w_[j * n_ + i]) > tolerance)
        throw ValidationError(
            fmt::format("column {} differs from its transpose", j + 1),
            i + 1);
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance)
      throw ValidationError(fmt::format("row sums to {:.12g}, not 1", sum),
                            i + 1);
  }
}

MixingMatrix ring(std::size_t n) {
  if (n < 3) return complete(n);
  std::vector<double> w(n * n, 0.0);
  const double third = 1.0 / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i * n + i] = third;
    w[i * n + (i + 1) % n] = third;
    w[i * n + (i + n - 1) % n] = third;
  }
  return MixingMatrix(n, std::move(w));
}

MixingMatrix complete(std::size_t n) {
  if (n == 0) throw ValidationError("matrix must have at least one row", 0);
  return MixingMatrix(n, std::vector<double>(n * n, 1.0 / static_cast<double>(n)));
}

MixingMatrix identity(std::size_t n) {
  if (n == 0) throw ValidationError("matrix must have at least one row", 0);
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[i * n + i] = 1.0;
  return MixingMatrix(n, std::move(w));
}

MixingMatrix read_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      double v = 0.0;
      const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || end != tok.data() + tok.size())
        throw ParseError("non-numeric matrix entry '" + tok + "'", lineno);
      row.push_back(v);
    }
    if (row.empty()) continue;
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw ValidationError("matrix file is empty", 0);
  std::vector<double> w;
  w.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw ValidationError(
          fmt::format("has {} entries, expected {}", rows[i].size(), n), i + 1);
    w.insert(w.end(), rows[i].begin(), rows[i].end());
  }
  return MixingMatrix(n, std::move(w), 1e-9);
}

MixingMatrix from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const MixingMatrix& w) {
  for (std::size_t i = 0; i < w.n(); ++i) {
    std::string line;
    for (std::size_t j = 0; j < w.n(); ++j)
      line += fmt::format("{}{:.17g}", j ? " " : "", w(i, j));
    out << line << '\n';
  }
}

TopologySchedule::TopologySchedule(std::size_t n, bool federated,
                                   std::size_t q,
                                   std::vector<MixingMatrix> mats)
    : n_(n), federated_(federated), q_(q), mats_(std::move(mats)) {}

TopologySchedule TopologySchedule::fixed(MixingMatrix w) {
  const std::size_t n = w.n();
  return TopologySchedule(n, false, 1, {std::move(w)});
}

TopologySchedule TopologySchedule::federated(std::size_t n,
                                             std::size_t period_q) {
  if (period_q < 1) throw ConfigError("federated period q must be >= 1");
  return TopologySchedule(n, true, period_q, {identity(n), complete(n)});
}

const MixingMatrix& TopologySchedule::at(std::size_t t) const {
  if (!federated_) return mats_[0];
  return (t + 1) % q_ == 0 ? mats_[1] : mats_[0];
}

const MixingMatrix& schedule_at(const TopologySchedule& s, std::size_t t) {
  return s.at(t);
}

double spectral_gap(const MixingMatrix& w, double rel_tol,
                    std::size_t max_iter) {
  const std::size_t n = w.n();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> m(n * n);
  for (std::size_t k = 0; k < n * n; ++k) m[k] = w.entries()[k] - inv_n;

  auto apply = [&](const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += m[i * n + j] * x[j];
    return y;
  };
  auto norm = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  };

  RngStream rng(0x5eed, DrawKind::kInit);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  double nv = norm(v);
  for (auto& x : v) x /= nv;

  double mu = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    // W - J is symmetric, so (W - J)^T (W - J) is two applications.
    std::vector<double> y = apply(apply(v));
    double next = 0.0;
    for (std::size_t i = 0; i < n; ++i) next += v[i] * y[i];
    const double ny = norm(y);
    if (ny == 0.0) return 0.0;
    if (it > 0 && std::abs(next - mu) <= rel_tol * std::abs(next))
      return std::sqrt(std::max(next, 0.0));
    mu = next;
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / ny;
  }
  throw NumericalError(
      fmt::format("spectral_gap: power iteration did not converge in {} "
                  "iterations (last estimate {:.12g})",
                  max_iter, std::sqrt(std::max(mu, 0.0))),
      std::sqrt(std::max(mu, 0.0)));
}

void mix_row(const MixingMatrix& w, std::size_t row,
             const std::vector<const std::vector<double>*>& vectors,
             std::vector<double>& out) {
  const std::size_t n = w.n();
  if (vectors.size() != n)
    throw ContractError(fmt::format("mix: {} vectors for a {}-node matrix",
                                    vectors.size(), n));
  const std::size_t len = vectors[0]->size();
  out.assign(len, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double wr = w(row, r);
    const auto& v = *vectors[r];
    if (v.size() != len) throw ContractError("mix: vector lengths differ");
    if (wr == 0.0) continue;
    for (std::size_t k = 0; k < len; ++k) out[k] += wr * v[k];
  }
}

std::vector<std::vector<double>> mix(
    const MixingMatrix& w, const std::vector<std::vector<double>>& vectors) {
  std::vector<const std::vector<double>*> ptrs;
  ptrs.reserve(vectors.size());
  for (const auto& v : vectors) ptrs.push_back(&v);
  if (ptrs.size() != w.n())
    throw ContractError(fmt::format("mix: {} vectors for a {}-node matrix",
                                    ptrs.size(), w.n()));
  std::vector<std::vector<double>> out(w.n());
  for (std::size_t i = 0; i < w.n(); ++i) mix_row(w, i, ptrs, out[i]);
  return out;
}

}  // namespace slate
