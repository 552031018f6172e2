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
#include <iosfwd>
#include <string>
#include <vector>

#include "slate/data.hpp"
#include "slate/model.hpp"
#include "slate/optimizer.hpp"
#include "slate/topology.hpp"

namespace slate {

enum class Algorithm { kSlate, kSlateM, kDpsgd };
enum class TopologyKind { kRing, kComplete, kIdentity, kFederated, kFile };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm a);
TopologyKind parse_topology_kind(const std::string& name);
std::string to_string(TopologyKind k);

struct ExperimentConfig {
  // Data: a LIBSVM path, or a synthetic draw when the path is empty.
  std::string data_path;
  std::size_t synth_n = 4000;
  std::size_t synth_dim = 20;
  double synth_pos_frac = 0.03;
  double synth_separation = 1.5;
  // Test data: a LIBSVM path, or a seeded holdout of the full data.
  std::string test_path;
  double holdout = 0.2;
  double drop_frac = 0.0;
  bool scale = true;

  std::size_t n_nodes = 8;
  PartitionScheme partition = PartitionScheme::kIid;

  ModelKind model = ModelKind::kLinear;
  std::size_t hidden = 28;

  Algorithm algorithm = Algorithm::kSlate;
  SlateMConfig opt;               // SLATE uses the SlateConfig part
  std::size_t dpsgd_batch = 20;   // D-PSGD minibatch (step size is opt.eta)

  TopologyKind topology = TopologyKind::kRing;
  std::size_t period_q = 5;
  std::string topology_path;

  std::size_t rounds = 100;
  std::size_t eval_every = 10;
  std::uint64_t seed = 1;

  std::string output;     // metrics CSV; empty disables
  std::string model_out;  // final mean model; empty disables
  std::string test_out;   // prepared test split as LIBSVM; empty disables

  std::size_t threads = 1;  // 1 = serial engine, 0 = all cores
  bool timing = false;      // wall-clock elapsed_ms (otherwise logged as 0)
};

// Static checks only; returns one message per problem, empty when valid.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

struct PreparedData {
  Dataset train;  // after holdout, positive dropping and scaling
  Dataset test;
};

PreparedData prepare_data(const ExperimentConfig& cfg);
TopologySchedule build_schedule(const ExperimentConfig& cfg);

struct MetricsRow {
  std::size_t round = 0;
  double mean_train_surrogate = 0.0;  // -F on the fixed probe batch
  double test_ap = 0.0;
  double consensus_error = 0.0;
  std::size_t clamp_events = 0;  // since the previous row
  double elapsed_ms = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "round,mean_train_surrogate,test_ap,consensus_error,clamp_events,"
    "elapsed_ms";

std::string format_row(const MetricsRow& row);

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  ModelParams final_model;
};

// Validates, prepares data and topology, runs `rounds` model updates and logs
// a row at round 0, every eval_every rounds, and at the final round. Throws
// ConfigError before any compute and NumericalError on non-finite parameters.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Config text: `key = value` lines, `#` comments, and [data] / [model] /
// [algorithm] / [topology] sections whose keys are addressed as
// `section.key`. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void set_config_value(ExperimentConfig& cfg, const std::string& dotted_key,
                      const std::string& value);
// Writes every key so that parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const ExperimentConfig& cfg);
std::vector<std::string> config_keys();

}  // namespace slate
