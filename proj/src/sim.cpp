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

#include "slate/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "slate/error.hpp"
#include "slate/executor.hpp"
#include "slate/metrics.hpp"
#include "slate/rng.hpp"
#include "slate/surrogate.hpp"

namespace slate {
namespace {

// Independent sub-seeds for the stages of one experiment.
enum class SeedTag : std::uint32_t {
  kData = 1,
  kSplit,
  kDrop,
  kPartition,
  kStreams,
  kProbe,
};

std::uint64_t derive_seed(std::uint64_t seed, SeedTag tag) {
  return RngStream(seed, static_cast<std::uint32_t>(tag), 0, DrawKind::kData)
      .next_u64();
}

Dataset pad_dim(Dataset ds, std::size_t dim) {
  if (ds.dim == dim) return ds;
  ds.dim = dim;
  for (auto& s : ds.samples) s.features.resize(dim, 0.0);
  return ds;
}

bool all_finite(const std::vector<NodeState>& states) {
  for (const auto& st : states)
    for (double v : st.x.theta)
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "slate") return Algorithm::kSlate;
  if (name == "slate_m") return Algorithm::kSlateM;
  if (name == "dpsgd") return Algorithm::kDpsgd;
  throw ConfigError("unknown algorithm '" + name +
                    "' (expected slate, slate_m or dpsgd)");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kSlate: return "slate";
    case Algorithm::kSlateM: return "slate_m";
    case Algorithm::kDpsgd: return "dpsgd";
  }
  return "?";
}

TopologyKind parse_topology_kind(const std::string& name) {
  if (name == "ring") return TopologyKind::kRing;
  if (name == "complete") return TopologyKind::kComplete;
  if (name == "identity") return TopologyKind::kIdentity;
  if (name == "federated") return TopologyKind::kFederated;
  if (name == "file") return TopologyKind::kFile;
  throw ConfigError("unknown topology '" + name +
                    "' (expected ring, complete, identity, federated or file)");
}

std::string to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::kRing: return "ring";
    case TopologyKind::kComplete: return "complete";
    case TopologyKind::kIdentity: return "identity";
    case TopologyKind::kFederated: return "federated";
    case TopologyKind::kFile: return "file";
  }
  return "?";
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errs;
  namespace fs = std::filesystem;
  if (cfg.rounds < 1) errs.push_back("rounds must be >= 1");
  if (cfg.eval_every < 1) errs.push_back("eval_every must be >= 1");
  if (cfg.n_nodes < 1) errs.push_back("n_nodes must be >= 1");

  if (cfg.data_path.empty()) {
    if (cfg.synth_n < 2) errs.push_back("data.n must be >= 2");
    if (cfg.synth_dim < 1) errs.push_back("data.dim must be >= 1");
    if (!(cfg.synth_pos_frac > 0.0 && cfg.synth_pos_frac < 1.0))
      errs.push_back("data.pos_frac must lie in (0, 1)");
    if (!(cfg.synth_separation >= 0.0))
      errs.push_back("data.separation must be >= 0");
  } else if (!fs::exists(cfg.data_path)) {
    errs.push_back("data.path '" + cfg.data_path + "' does not exist");
  }
  if (cfg.test_path.empty()) {
    if (!(cfg.holdout > 0.0 && cfg.holdout < 1.0))
      errs.push_back("data.holdout must lie in (0, 1)");
  } else if (!fs::exists(cfg.test_path)) {
    errs.push_back("data.test_path '" + cfg.test_path + "' does not exist");
  }
  if (!(cfg.drop_frac >= 0.0 && cfg.drop_frac < 1.0))
    errs.push_back("drop_frac must lie in [0, 1)");
  if (cfg.model == ModelKind::kMlp && cfg.hidden < 1)
    errs.push_back("model.hidden must be >= 1");

  try {
    if (cfg.algorithm == Algorithm::kSlateM)
      cfg.opt.validate();
    else
      cfg.opt.SlateConfig::validate();
  } catch (const Error& e) {
    errs.push_back(std::string("algorithm: ") + e.what());
  }
  if (cfg.algorithm == Algorithm::kDpsgd && cfg.dpsgd_batch < 1)
    errs.push_back("algorithm.batch must be >= 1");

  switch (cfg.topology) {
    case TopologyKind::kFederated:
      if (cfg.period_q < 1) errs.push_back("topology.q must be >= 1");
      break;
    case TopologyKind::kFile:
      if (cfg.topology_path.empty()) {
        errs.push_back("topology.path is required for topology.kind = file");
        break;
      }
      try {
        const auto w = from_file(cfg.topology_path);
        if (w.n() != cfg.n_nodes)
          errs.push_back(fmt::format(
              "topology file has {} nodes but n_nodes = {}", w.n(), cfg.n_nodes));
      } catch (const Error& e) {
        errs.push_back(std::string("topology.path: ") + e.what());
      }
      break;
    default:
      break;
  }
  return errs;
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
  Dataset full =
      cfg.data_path.empty()
          ? gen_synthetic(cfg.synth_n, cfg.synth_dim, cfg.synth_pos_frac,
                          cfg.synth_separation,
                          derive_seed(cfg.seed, SeedTag::kData))
          : load_libsvm(cfg.data_path);

  PreparedData out;
  if (!cfg.test_path.empty()) {
    Dataset test = load_libsvm(cfg.test_path);
    const std::size_t dim = std::max(full.dim, test.dim);
    out.train = pad_dim(std::move(full), dim);
    out.test = pad_dim(std::move(test), dim);
  } else {
    const std::size_t n = full.size();
    if (n < 2) throw ConfigError("need at least two samples to hold out a test split");
    auto n_test = static_cast<std::size_t>(
        std::llround(cfg.holdout * static_cast<double>(n)));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng(derive_seed(cfg.seed, SeedTag::kSplit), DrawKind::kData);
    rng.shuffle(order);
    std::vector<std::size_t> train_idx(order.begin(), order.end() - n_test);
    std::vector<std::size_t> test_idx(order.end() - n_test, order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    out.train = full.subset(train_idx);
    out.test = full.subset(test_idx);
  }
  if (out.train.positive_indices().empty())
    throw ConfigError("training split has no positive samples");
  if (out.test.positive_indices().empty())
    throw ConfigError("test split has no positive samples");

  if (cfg.drop_frac > 0.0)
    out.train = drop_positives(out.train, cfg.drop_frac,
                               derive_seed(cfg.seed, SeedTag::kDrop));
  if (cfg.scale) {
    const auto scaler = MinMaxScaler::fit(out.train);
    out.train = scaler.apply(out.train);
    out.test = scaler.apply(out.test);
  }
  return out;
}

TopologySchedule build_schedule(const ExperimentConfig& cfg) {
  switch (cfg.topology) {
    case TopologyKind::kRing:
      return TopologySchedule::fixed(ring(cfg.n_nodes));
    case TopologyKind::kComplete:
      return TopologySchedule::fixed(complete(cfg.n_nodes));
    case TopologyKind::kIdentity:
      return TopologySchedule::fixed(identity(cfg.n_nodes));
    case TopologyKind::kFederated:
      return TopologySchedule::federated(cfg.n_nodes, cfg.period_q);
    case TopologyKind::kFile: {
      auto w = from_file(cfg.topology_path);
      if (w.n() != cfg.n_nodes)
        throw ConfigError(fmt::format(
            "topology file has {} nodes but n_nodes = {}", w.n(), cfg.n_nodes));
      return TopologySchedule::fixed(std::move(w));
    }
  }
  throw ConfigError("unknown topology");
}

std::string format_row(const MetricsRow& row) {
  return fmt::format("{},{:.17g},{:.17g},{:.17g},{},{:.0f}", row.round,
                     row.mean_train_surrogate, row.test_ap,
                     row.consensus_error, row.clamp_events, row.elapsed_ms);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (auto errs = validate_config(cfg); !errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  const auto start = std::chrono::steady_clock::now();

  const PreparedData data = prepare_data(cfg);
  const ModelSpec spec{cfg.model, data.train.dim,
                       cfg.model == ModelKind::kMlp ? cfg.hidden : 0};
  const Partition part =
      partition(data.train, cfg.n_nodes, cfg.partition,
                derive_seed(cfg.seed, SeedTag::kPartition));
  const std::vector<Shard> shards = make_shards(data.train, part);
  const TopologySchedule schedule = build_schedule(cfg);

  SlateMConfig opt = cfg.opt;
  opt.seed = cfg.seed;
  const StreamFactory streams{derive_seed(cfg.seed, SeedTag::kStreams)};

  // Fixed probe batch for the logged training surrogate.
  std::vector<std::size_t> probe_pos;
  std::vector<std::size_t> probe_inner;
  {
    const auto positives = data.train.positive_indices();
    RngStream rng(derive_seed(cfg.seed, SeedTag::kProbe), DrawKind::kProbe);
    for (std::size_t k :
         rng.sample(positives.size(), std::min<std::size_t>(256, positives.size())))
      probe_pos.push_back(positives[k]);
    probe_inner = rng.sample(data.train.size(),
                             std::min<std::size_t>(2048, data.train.size()));
  }

  std::ofstream csv;
  if (!cfg.output.empty()) {
    csv.open(cfg.output);
    if (!csv) throw Error("cannot write '" + cfg.output + "'");
    csv << kMetricsHeader << '\n' << std::flush;
  }

  Executor exec(cfg.threads);
  std::vector<NodeState> states = slate_init(spec, cfg.n_nodes, opt);
  ExperimentResult result;
  std::size_t clamps_since_row = 0;

  auto log_row = [&](std::size_t round) {
    MetricsRow row;
    row.round = round;
    const ModelParams mean = mean_params(states);
    row.mean_train_surrogate =
        -batch_objective(mean, data.train, probe_pos, probe_inner, opt.surrogate);
    row.test_ap = evaluate(mean, data.test).ap;
    std::vector<std::vector<double>> xs;
    xs.reserve(states.size());
    for (const auto& st : states) xs.push_back(st.x.theta);
    row.consensus_error = consensus_error(xs);
    row.clamp_events = clamps_since_row;
    clamps_since_row = 0;
    if (cfg.timing)
      row.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    if (csv.is_open()) csv << format_row(row) << '\n' << std::flush;
    result.rows.push_back(row);
  };

  log_row(0);
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    const MixingMatrix& w = schedule.at(t);
    switch (cfg.algorithm) {
      case Algorithm::kSlate:
        clamps_since_row +=
            slate_round(states, shards, w, opt, streams, t, &exec).clamp_events;
        break;
      case Algorithm::kSlateM:
        if (t == 0) {
          RoundStats st;
          states = slatem_init(spec, shards, w, opt, streams, &exec, &st);
          clamps_since_row += st.clamp_events;
        } else {
          clamps_since_row +=
              slatem_round(states, shards, w, opt, streams, t, &exec)
                  .clamp_events;
        }
        break;
      case Algorithm::kDpsgd:
        dpsgd_round(states, shards, w, opt.eta, cfg.dpsgd_batch, streams, t,
                    &exec);
        break;
    }
    if (!all_finite(states))
      throw NumericalError(
          fmt::format("non-finite model parameters after round {}", t + 1),
          static_cast<double>(t + 1));
    const std::size_t r = t + 1;
    if (r % cfg.eval_every == 0 || r == cfg.rounds) log_row(r);
  }

  result.final_model = mean_params(states);
  if (!cfg.model_out.empty()) save_model(cfg.model_out, result.final_model);
  if (!cfg.test_out.empty()) save_libsvm(cfg.test_out, data.test);
  return result;
}

}  // namespace slate
