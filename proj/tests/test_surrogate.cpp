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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "slate/error.hpp"
#include "slate/surrogate.hpp"

namespace slate {
namespace {

const ModelSpec kLin{ModelKind::kLinear, 3, 0};
const ModelSpec kMlp{ModelKind::kMlp, 3, 4};

// Double loop over (anchor, inner) pairs using the reference forward pass.
double reference_objective(const ModelParams& p, const Dataset& ds,
                           const std::vector<std::size_t>& pos,
                           const std::vector<std::size_t>& inner, double s,
                           bool include_anchor) {
  double total = 0.0;
  for (std::size_t a : pos) {
    std::vector<std::size_t> batch;
    if (include_anchor) batch.push_back(a);
    batch.insert(batch.end(), inner.begin(), inner.end());
    const double ha = testing::reference_score(p, ds[a].features);
    double g1 = 0.0, g2 = 0.0;
    for (std::size_t j : batch) {
      const double hinge =
          std::max(s - ha + testing::reference_score(p, ds[j].features), 0.0);
      g2 += hinge * hinge;
      if (ds[j].label > 0) g1 += hinge * hinge;
    }
    total += -g1 / g2;
  }
  return total / static_cast<double>(pos.size());
}

// Smallest distance of any hinge argument from its kink.
double min_hinge_margin(const ModelParams& p, const Dataset& ds,
                        const std::vector<std::size_t>& pos,
                        const std::vector<std::size_t>& inner, double s) {
  double m = INFINITY;
  for (std::size_t a : pos)
    for (std::size_t j : inner) {
      if (j == a) continue;
      const double arg = s - testing::reference_score(p, ds[a].features) +
                         testing::reference_score(p, ds[j].features);
      m = std::min(m, std::abs(arg));
    }
  return m;
}

struct Instance {
  Dataset ds;
  std::vector<std::size_t> pos, inner;
};

Instance random_instance(std::mt19937_64& gen, std::size_t dim, std::size_t b,
                         std::size_t m) {
  Instance in;
  do {
    in.ds = testing::random_dataset(gen, 14, dim, 0.4);
  } while (in.ds.positive_indices().size() < b);
  auto positives = in.ds.positive_indices();
  std::shuffle(positives.begin(), positives.end(), gen);
  in.pos.assign(positives.begin(), positives.begin() + b);
  std::uniform_int_distribution<std::size_t> pick(0, in.ds.size() - 1);
  for (std::size_t k = 0; k < m; ++k) in.inner.push_back(pick(gen));
  return in;
}

TEST(PairLoss, Examples) {
  EXPECT_DOUBLE_EQ(pair_loss(0.4, 0.4, 0.1), 0.01);
  EXPECT_EQ(pair_loss(1.0, 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(pair_loss(0.8, 0.3, 1.0), 0.25);
}

TEST(SurrogateValue, Examples) {
  EXPECT_EQ(surrogate_value({0.3, 0.3}), -1.0);
  EXPECT_EQ(surrogate_value({0.0, 1e-12, true}), 0.0);
  EXPECT_EQ(surrogate_value({1.0, 2.0}), -0.5);
}

TEST(SurrogateConfig, Validation) {
  EXPECT_NO_THROW(SurrogateConfig{}.validate());
  EXPECT_THROW((SurrogateConfig{0.0, 1e-12, true}.validate()), ContractError);
  EXPECT_THROW((SurrogateConfig{0.1, 0.0, true}.validate()), ContractError);
  EXPECT_THROW((SurrogateConfig{0.1, 0.02, true}.validate()), ContractError);
}

TEST(InnerEstimates, SelfPairOnly) {
  const ModelParams p = init_params(kLin, 1);
  const Sample anchor{{0.3, -0.2, 1.0}, 1};
  const SurrogateConfig cfg{0.1, 1e-12, true};
  const InnerEstimate e = inner_estimates(p, anchor, {}, cfg);
  EXPECT_DOUBLE_EQ(e.g1, 0.01);
  EXPECT_DOUBLE_EQ(e.g2, 0.01);
  EXPECT_FALSE(e.clamped);
}

TEST(InnerEstimates, OnlySelfPairActive) {
  ModelParams p = zero_params({ModelKind::kLinear, 1, 0});
  p.theta = {1.0, 0.0};
  const double s = 0.1;
  const Sample anchor{{5.0}, 1};
  std::vector<Sample> inner;
  for (int k = 0; k < 7; ++k) inner.push_back({{-5.0 - k}, -1});
  const InnerEstimate e = inner_estimates(p, anchor, inner, {s, 1e-12, true});
  EXPECT_DOUBLE_EQ(e.g1, s * s / 8.0);
  EXPECT_DOUBLE_EQ(e.g2, s * s / 8.0);
}

TEST(InnerEstimates, MatchesPairAveraging) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p = testing::random_params(gen, kMlp, 1.0);
    Dataset ds = testing::random_dataset(gen, 9, 3, 0.5);
    Sample anchor = ds[0];
    anchor.label = 1;
    const std::vector<Sample> inner(ds.samples.begin() + 1, ds.samples.end());
    const bool with_anchor = trial % 2;
    const InnerEstimate e = inner_estimates(p, anchor, inner, {0.2, 1e-12, with_anchor});
    const double ha = testing::reference_score(p, anchor.features);
    double g1 = 0, g2 = 0;
    std::size_t m = inner.size();
    if (with_anchor) {
      g1 += 0.04;
      g2 += 0.04;
      ++m;
    }
    for (const auto& x : inner) {
      const double l =
          std::pow(std::max(0.2 - ha + testing::reference_score(p, x.features), 0.0), 2);
      g2 += l;
      if (x.label > 0) g1 += l;
    }
    EXPECT_NEAR(e.g1, g1 / m, 1e-15);
    EXPECT_NEAR(e.g2, std::max(g2 / m, 1e-12), 1e-15);
  }
}

TEST(InnerEstimates, NegativeAnchorThrows) {
  const ModelParams p = init_params(kLin, 1);
  const Sample anchor{{0, 0, 0}, -1};
  EXPECT_THROW(inner_estimates(p, anchor, {}, {}), ContractError);
}

TEST(InnerEstimates, ClampRaisesFloor) {
  ModelParams p = zero_params({ModelKind::kLinear, 1, 0});
  p.theta = {1.0, 0.0};
  const Sample anchor{{5.0}, 1};
  const std::vector<Sample> inner{{{-5.0}, -1}, {{-6.0}, -1}};
  const InnerEstimate e = inner_estimates(p, anchor, inner, {0.1, 1e-12, false});
  EXPECT_TRUE(e.clamped);
  EXPECT_EQ(e.g1, 0.0);
  EXPECT_EQ(e.g2, 1e-12);
  EXPECT_EQ(surrogate_value(e), 0.0);
}

TEST(InnerEstimates, OrderingAndFloorProperty) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams p = testing::random_params(gen, kLin, 3.0);
    const Dataset ds = testing::random_dataset(gen, 11, 3, 0.3);
    Sample anchor = ds[0];
    anchor.label = 1;
    const std::vector<Sample> inner(ds.samples.begin() + 1, ds.samples.end());
    const double s = 0.05;
    const InnerEstimate e = inner_estimates(p, anchor, inner, {s, 1e-12, true});
    EXPECT_GE(e.g1, 0.0);
    EXPECT_LE(e.g1, e.g2);
    EXPECT_GE(e.g2, s * s / 11.0 * (1 - 1e-15));
  }
}

TEST(BatchObjective, SelfPairIsMinusOne) {
  const Dataset ds = gen_synthetic(20, 3, 0.2, 1.0, 1);
  const ModelParams p = init_params(kLin, 2);
  const std::vector<std::size_t> pos{ds.positive_indices()[0]};
  EXPECT_EQ(batch_objective(p, ds, pos, {}, {0.1, 1e-12, true}), -1.0);
}

TEST(BatchObjective, EmptyAnchorsThrow) {
  const Dataset ds = gen_synthetic(20, 3, 0.2, 1.0, 1);
  const ModelParams p = init_params(kLin, 2);
  const std::vector<std::size_t> inner{0, 1};
  EXPECT_THROW(batch_objective(p, ds, {}, inner, {}), ContractError);
  EXPECT_THROW(biased_grad(p, ds, {}, inner, {}), ContractError);
}

TEST(BatchObjective, PerfectRankingReachesMinusOne) {
  // Positives near 0.95, negatives near 0.05: every active pair is positive.
  Dataset ds;
  ds.dim = 1;
  for (int i = 0; i < 5; ++i) ds.samples.push_back({{3.0 + 0.1 * i}, 1});
  for (int i = 0; i < 40; ++i) ds.samples.push_back({{-3.0 - 0.05 * i}, -1});
  ModelParams p = zero_params({ModelKind::kLinear, 1, 0});
  p.theta = {1.0, 0.0};
  ScoredSet ss;
  for (const auto& x : ds.samples) {
    ss.scores.push_back(testing::reference_score(p, x.features));
    ss.labels.push_back(x.label);
  }
  ASSERT_EQ(testing::brute_force_ap(ss.scores, ss.labels), 1.0);
  for (double s : {0.1, 0.01}) {
    EXPECT_EQ(-full_objective(p, ds, {s, 1e-12, true}),
              testing::brute_force_ap(ss.scores, ss.labels));
  }
}

TEST(BatchObjective, SmallMarginLimitIsGapWeighted) {
  // One positive below two negatives: the s -> 0 limit weights each violator
  // by its squared score gap rather than counting it.
  Dataset ds;
  ds.dim = 1;
  ds.samples = {{{0.0}, 1}, {{0.0}, 1}, {{1.0}, -1}, {{2.0}, -1}};
  ds.samples[1].features = {3.0};
  ModelParams p = zero_params({ModelKind::kLinear, 1, 0});
  p.theta = {1.0, 0.0};
  auto h = [&](std::size_t i) { return testing::reference_score(p, ds[i].features); };
  // Anchor 0: violators 1 (positive), 2, 3. Anchor 1 is ranked first.
  const double d1 = std::pow(h(1) - h(0), 2), d2 = std::pow(h(2) - h(0), 2),
               d3 = std::pow(h(3) - h(0), 2);
  const double limit = -0.5 * (1.0 + d1 / (d1 + d2 + d3));
  EXPECT_NEAR(full_objective(p, ds, {1e-4, 1e-12, false}), limit, 1e-4);
}

TEST(BatchObjective, BoundedProperty) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& spec = trial % 2 ? kMlp : kLin;
    const ModelParams p = testing::random_params(gen, spec, 2.0);
    const Instance in = random_instance(gen, 3, 2, 5);
    const double v = batch_objective(p, in.ds, in.pos, in.inner, {0.1, 1e-12, trial % 3 != 0});
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 0.0);
  }
}

TEST(BatchObjective, MatchesReferenceObjective) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto& spec = trial % 2 ? kMlp : kLin;
    const ModelParams p = testing::random_params(gen, spec, 1.0);
    const Instance in = random_instance(gen, 3, 3, 6);
    EXPECT_NEAR(batch_objective(p, in.ds, in.pos, in.inner, {0.1, 1e-12, true}),
                reference_objective(p, in.ds, in.pos, in.inner, 0.1, true), 1e-14);
  }
}

TEST(BiasedGrad, SelfPairOnlyIsZero) {
  const Dataset ds = gen_synthetic(20, 3, 0.2, 1.0, 1);
  const ModelParams p = init_params(kMlp, 2);
  const auto pos = ds.positive_indices();
  const std::vector<double> g = biased_grad(p, ds, pos, {}, {0.1, 1e-12, true});
  for (double x : g) EXPECT_EQ(x, 0.0);
}

TEST(BiasedGrad, ZeroParamsClosedForm) {
  std::mt19937_64 gen(7);
  const double s = 0.1;
  for (int trial = 0; trial < 20; ++trial) {
    const Instance in = random_instance(gen, 3, 2, 8);
    const ModelParams p = zero_params(kLin);
    // At theta = 0 every score is 0.5, every hinge equals s, and dh = [z, 1]/4.
    double phat = 0;
    for (auto j : in.inner) phat += in.ds[j].positive();
    phat /= static_cast<double>(in.inner.size());
    std::vector<double> want(4, 0.0);
    for (auto a : in.pos)
      for (auto j : in.inner) {
        const double c = (phat - (in.ds[j].positive() ? 1.0 : 0.0)) / (s * s);
        for (std::size_t k = 0; k < 4; ++k) {
          const double zj = k < 3 ? in.ds[j].features[k] : 1.0;
          const double za = k < 3 ? in.ds[a].features[k] : 1.0;
          want[k] += c * 2.0 * s * 0.25 * (zj - za);
        }
      }
    for (auto& w : want) w /= static_cast<double>(in.pos.size() * in.inner.size());
    const auto got = biased_grad(p, in.ds, in.pos, in.inner, {s, 1e-12, false});
    EXPECT_LT(testing::max_abs_diff(got, want), 1e-12);
  }
}

TEST(BiasedGrad, FiniteDifferences) {
  std::mt19937_64 gen(8);
  const double s = 0.1;
  for (const auto& spec : {kLin, kMlp}) {
    int checked = 0;
    while (checked < 100) {
      const ModelParams p = testing::random_params(gen, spec, 0.7);
      const Instance in = random_instance(gen, 3, 3, 6);
      if (min_hinge_margin(p, in.ds, in.pos, in.inner, s) < 1e-3) continue;
      if (testing::min_relu_margin(p, in.ds) < 1e-3) continue;
      auto f = [&](const std::vector<double>& th) {
        return reference_objective({spec, th}, in.ds, in.pos, in.inner, s, true);
      };
      const auto fd = testing::central_difference(f, p.theta);
      std::size_t clamps = 0;
      const auto g = biased_grad(p, in.ds, in.pos, in.inner, {s, 1e-12, true}, &clamps);
      ASSERT_EQ(clamps, 0u);
      if (testing::norm2(fd) < 1e-8) continue;
      EXPECT_LT(testing::relative_error(g, fd), 1e-5);
      ++checked;
    }
  }
}

TEST(BiasedGrad, InnerPermutationInvariant) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto& spec = trial % 2 ? kMlp : kLin;
    const ModelParams p = testing::random_params(gen, spec, 1.0);
    Instance in = random_instance(gen, 3, 2, 7);
    const auto g = biased_grad(p, in.ds, in.pos, in.inner, {});
    std::shuffle(in.inner.begin(), in.inner.end(), gen);
    const auto h = biased_grad(p, in.ds, in.pos, in.inner, {});
    EXPECT_LE(testing::max_abs_diff(g, h), 1e-13 * std::max(1.0, testing::norm2(g)));
  }
}

TEST(BiasedGrad, CountsClampEvents) {
  Dataset ds;
  ds.dim = 1;
  ds.samples = {{{5.0}, 1}, {{-5.0}, -1}, {{-6.0}, -1}};
  ModelParams p = zero_params({ModelKind::kLinear, 1, 0});
  p.theta = {1.0, 0.0};
  const std::vector<std::size_t> pos{0}, inner{1, 2};
  std::size_t clamps = 0;
  const auto g = biased_grad(p, ds, pos, inner, {0.1, 1e-12, false}, &clamps);
  EXPECT_EQ(clamps, 1u);
  for (double x : g) EXPECT_EQ(x, 0.0);
}

TEST(FullGrad, EqualsBiasedGradOnWholeDataset) {
  std::mt19937_64 gen(10);
  for (const auto& spec : {kLin, kMlp}) {
    const ModelParams p = testing::random_params(gen, spec, 1.0);
    Dataset ds;
    do {
      ds = testing::random_dataset(gen, 25, 3, 0.3);
    } while (ds.positive_indices().empty());
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const SurrogateConfig cfg{0.1, 1e-12, false};
    EXPECT_EQ(full_grad(p, ds, cfg),
              biased_grad(p, ds, ds.positive_indices(), all, cfg));
    EXPECT_EQ(full_objective(p, ds, cfg),
              batch_objective(p, ds, ds.positive_indices(), all, cfg));
  }
}

TEST(FullGrad, FiniteDifferences) {
  std::mt19937_64 gen(11);
  int checked = 0;
  while (checked < 20) {
    const auto& spec = checked % 2 ? kMlp : kLin;
    const ModelParams p = testing::random_params(gen, spec, 0.7);
    Dataset ds;
    do {
      ds = testing::random_dataset(gen, 15, 3, 0.3);
    } while (ds.positive_indices().empty());
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto pos = ds.positive_indices();
    if (min_hinge_margin(p, ds, pos, all, 0.1) < 1e-3) continue;
    if (testing::min_relu_margin(p, ds) < 1e-3) continue;
    auto f = [&](const std::vector<double>& th) {
      return reference_objective({spec, th}, ds, pos, all, 0.1, false);
    };
    const auto fd = testing::central_difference(f, p.theta);
    if (testing::norm2(fd) < 1e-8) continue;
    EXPECT_LT(testing::relative_error(full_grad(p, ds, {0.1, 1e-12, false}), fd), 1e-5);
    ++checked;
  }
}

TEST(FullGrad, TwoPointHandUnrolled) {
  Dataset ds;
  ds.dim = 2;
  ds.samples = {{{0.2, -0.4}, 1}, {{0.5, 0.1}, -1}};
  ModelParams p = zero_params({ModelKind::kLinear, 2, 0});
  p.theta = {0.3, -0.7, 0.05};
  const double s = 0.1;
  // f = -s^2 / (s^2 + L), L = max(s - h0 + h1, 0)^2.
  const double t0 = 0.3 * 0.2 - 0.7 * -0.4 + 0.05, t1 = 0.3 * 0.5 - 0.7 * 0.1 + 0.05;
  const double h0 = 1 / (1 + std::exp(-t0)), h1 = 1 / (1 + std::exp(-t1));
  const double r = std::max(s - h0 + h1, 0.0);
  ASSERT_GT(r, 0.0);
  const double L = r * r;
  const double df_dL = s * s / ((s * s + L) * (s * s + L));
  const double dh0[3] = {h0 * (1 - h0) * 0.2, h0 * (1 - h0) * -0.4, h0 * (1 - h0)};
  const double dh1[3] = {h1 * (1 - h1) * 0.5, h1 * (1 - h1) * 0.1, h1 * (1 - h1)};
  std::vector<double> want(3);
  for (int k = 0; k < 3; ++k) want[k] = df_dL * 2 * r * (dh1[k] - dh0[k]);
  const SurrogateConfig cfg{s, 1e-12, false};
  EXPECT_LT(testing::max_abs_diff(full_grad(p, ds, cfg), want), 1e-15);
  EXPECT_NEAR(full_objective(p, ds, cfg), -s * s / (s * s + L), 1e-15);
}

}  // namespace
}  // namespace slate
