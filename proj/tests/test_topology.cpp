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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "slate/error.hpp"
#include "slate/topology.hpp"

namespace slate {
namespace {

// Largest |eigenvalue| of the symmetric matrix W - J.
double dense_gap(const MixingMatrix& w) {
  const Eigen::Index n = static_cast<Eigen::Index>(w.n());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = w(i, j) - 1.0 / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<std::vector<double>> random_vectors(std::mt19937_64& gen,
                                                std::size_t n, std::size_t len) {
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> v(n, std::vector<double>(len));
  for (auto& row : v)
    for (auto& x : row) x = normal(gen);
  return v;
}

// A random symmetric doubly stochastic matrix: lazy Metropolis weights on a
// random graph.
MixingMatrix random_mixing(std::mt19937_64& gen, std::size_t n) {
  std::bernoulli_distribution edge(0.4);
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n));
  std::vector<std::size_t> deg(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(gen)) {
        adj[i][j] = adj[j][i] = true;
        ++deg[i];
        ++deg[j];
      }
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) {
        w[i * n + j] = 1.0 / (1.0 + static_cast<double>(std::max(deg[i], deg[j])));
        off += w[i * n + j];
      }
    w[i * n + i] = 1.0 - off;
  }
  return MixingMatrix(n, w, 1e-12);
}

TEST(Ring, SixNodeMatrix) {
  const MixingMatrix w = ring(6);
  const double t = 1.0 / 3.0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const std::size_t d = (i + 6 - j) % 6;
      EXPECT_EQ(w(i, j), (d == 0 || d == 1 || d == 5) ? t : 0.0) << i << "," << j;
    }
}

TEST(Ring, ThreeNodesIsComplete) {
  const MixingMatrix w = ring(3);
  for (double x : w.entries()) EXPECT_EQ(x, 1.0 / 3.0);
}

TEST(Ring, SmallSizesFallBackToComplete) {
  EXPECT_EQ(ring(1), complete(1));
  EXPECT_EQ(ring(2), complete(2));
}

TEST(Ring, RowsSumToOne) {
  for (std::size_t n = 3; n < 30; ++n) {
    const MixingMatrix w = ring(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += w(i, j);
      EXPECT_NEAR(s, 1.0, 1e-15);
    }
  }
}

TEST(Complete, Entries) {
  EXPECT_EQ(complete(1).entries(), std::vector<double>{1.0});
  const MixingMatrix w = complete(4);
  for (double x : w.entries()) EXPECT_EQ(x, 0.25);
}

TEST(MixingMatrix, RejectsInvalid) {
  auto row_of = [](std::size_t n, std::vector<double> e) -> std::size_t {
    try {
      MixingMatrix(n, std::move(e));
    } catch (const ValidationError& err) {
      return err.row();
    }
    return 0;
  };
  EXPECT_EQ(row_of(2, {0.5, 0.5, 0.4, 0.5}), 1u);
  EXPECT_EQ(row_of(2, {0.5, 0.5, 0.5, 0.4}), 2u);
  EXPECT_EQ(row_of(2, {1.2, -0.2, -0.2, 1.2}), 1u);
  EXPECT_EQ(row_of(2, {0.7, 0.3, 0.2, 0.8}), 1u);
  EXPECT_THROW(MixingMatrix(2, {0.5, 0.5, 0.5}), ValidationError);
}

TEST(MatrixFile, RoundTrip) {
  std::stringstream buf;
  write_matrix(buf, ring(4));
  EXPECT_EQ(read_matrix(buf), ring(4));
}

TEST(MatrixFile, Errors) {
  auto read = [](const std::string& s) {
    std::istringstream in(s);
    return read_matrix(in);
  };
  EXPECT_THROW(read("0.5 0.4\n0.4 0.5\n"), ValidationError);
  EXPECT_THROW(read("1.1 -0.1\n-0.1 1.1\n"), ValidationError);
  EXPECT_THROW(read("0.5 0.5\n0.5\n"), ValidationError);
  EXPECT_THROW(read("0.5 abc\n0.5 0.5\n"), ParseError);
  EXPECT_THROW(read(""), ValidationError);
  // Loose file tolerance accepts short decimals.
  EXPECT_NO_THROW(read("0.3333333333 0.3333333333 0.3333333334\n"
                       "0.3333333333 0.3333333333 0.3333333334\n"
                       "0.3333333334 0.3333333334 0.3333333332\n"));
  try {
    read("0.5 0.5 0\n0.5 0.5 0\n0 0 0.9\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.row(), 3u);
  }
}

TEST(Schedule, Federated) {
  const TopologySchedule s1 = TopologySchedule::federated(4, 1);
  for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(schedule_at(s1, t), complete(4));
  const TopologySchedule s5 = TopologySchedule::federated(4, 5);
  EXPECT_EQ(schedule_at(s5, 3), identity(4));
  EXPECT_EQ(schedule_at(s5, 4), complete(4));
  EXPECT_EQ(schedule_at(s5, 9), complete(4));
  EXPECT_EQ(schedule_at(s5, 10), identity(4));
}

TEST(Schedule, Static) {
  const TopologySchedule s = TopologySchedule::fixed(ring(4));
  for (std::size_t t : {0u, 1u, 17u, 1000u}) EXPECT_EQ(schedule_at(s, t), ring(4));
}

TEST(SpectralGap, KnownValues) {
  for (std::size_t n : {1u, 2u, 5u, 20u}) EXPECT_LE(spectral_gap(complete(n)), 1e-12);
  EXPECT_NEAR(spectral_gap(identity(4)), 1.0, 1e-10);
  EXPECT_EQ(spectral_gap(identity(1)), 0.0);
  EXPECT_NEAR(dense_gap(ring(4)), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(spectral_gap(ring(4)), dense_gap(ring(4)), 1e-9);
}

TEST(SpectralGap, MatchesDenseOracle) {
  for (std::size_t n = 3; n <= 40; ++n)
    EXPECT_NEAR(spectral_gap(ring(n)), dense_gap(ring(n)), 1e-8) << n;
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 30; ++trial) {
    const MixingMatrix w = random_mixing(gen, 3 + trial % 12);
    EXPECT_NEAR(spectral_gap(w), dense_gap(w), 1e-8);
  }
}

TEST(SpectralGap, RingAboveComplete) {
  for (std::size_t n = 3; n < 25; ++n) EXPECT_GE(spectral_gap(ring(n)), spectral_gap(complete(n)));
}

TEST(Mix, IdentityAndComplete) {
  std::mt19937_64 gen(3);
  const auto x = random_vectors(gen, 5, 7);
  EXPECT_EQ(mix(identity(5), x), x);
  const auto y = mix(complete(5), x);
  for (std::size_t k = 0; k < 7; ++k) {
    double mean = 0;
    for (const auto& v : x) mean += v[k];
    mean /= 5;
    for (const auto& v : y) EXPECT_NEAR(v[k], mean, 1e-15);
  }
}

TEST(Mix, ShapeMismatchThrows) {
  std::mt19937_64 gen(4);
  EXPECT_THROW(mix(ring(4), random_vectors(gen, 3, 2)), ContractError);
  auto x = random_vectors(gen, 4, 2);
  x[2].push_back(1.0);
  EXPECT_THROW(mix(ring(4), x), ContractError);
}

TEST(Mix, PreservesAverageProperty) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 10;
    const MixingMatrix w = trial % 2 ? ring(n) : random_mixing(gen, n);
    const auto x = random_vectors(gen, n, 6);
    const auto y = mix(w, x);
    double scale = 0;
    for (const auto& v : x) scale = std::max(scale, testing::norm2(v));
    for (std::size_t k = 0; k < 6; ++k) {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < n; ++i) {
        mx += x[i][k];
        my += y[i][k];
      }
      EXPECT_LE(std::abs(mx - my) / n, 1e-12 * scale);
    }
  }
}

TEST(Mix, ContractsTowardAverageProperty) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 12;
    const MixingMatrix w = trial % 3 ? random_mixing(gen, n) : ring(n);
    const double lambda = spectral_gap(w);
    const auto x = random_vectors(gen, n, 4);
    const auto jx = mix(complete(n), x);
    const auto wx = mix(w, x);
    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 4; ++k) {
        lhs += std::pow(wx[i][k] - jx[i][k], 2);
        rhs += std::pow(x[i][k] - jx[i][k], 2);
      }
    EXPECT_LE(std::sqrt(lhs), lambda * std::sqrt(rhs) + 1e-9);
  }
}

}  // namespace
}  // namespace slate
