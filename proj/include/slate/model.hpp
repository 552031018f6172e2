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
#include <span>
#include <string>
#include <vector>

namespace slate {

enum class ModelKind { kLinear, kMlp };

ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::kLinear;
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 0;  // mlp only

  // Flat parameter count: linear [w, b]; mlp [W1 row-major, b1, W2, b2].
  std::size_t param_count() const;
  bool operator==(const ModelSpec&) const = default;
};

struct ModelParams {
  ModelSpec spec;
  std::vector<double> theta;
};

// Xavier-normal weights, N(0, 2 / (fan_in + fan_out)); zero biases.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);
ModelParams zero_params(const ModelSpec& spec);

// Pre-sigmoid output and its gradient with respect to theta.
double logit(const ModelParams& p, std::span<const double> z);
double logit_and_grad(const ModelParams& p, std::span<const double> z,
                      std::span<double> grad);

double sigmoid(double t);

// Bounded score h(x; z) = sigmoid(logit).
double score(const ModelParams& p, std::span<const double> z);

struct ScoreGrad {
  double h = 0.0;
  std::vector<double> grad;  // dh/dtheta
};
ScoreGrad score_and_grad(const ModelParams& p, std::span<const double> z);
// Writes dh/dtheta into grad (length param_count) and returns h.
double score_and_grad(const ModelParams& p, std::span<const double> z,
                      std::span<double> grad);

// Text format: a spec line (`linear <d>` or `mlp <d> <h>`) followed by the
// parameters as whitespace-separated decimals.
void write_model(std::ostream& out, const ModelParams& p);
ModelParams read_model(std::istream& in);
void save_model(const std::string& path, const ModelParams& p);
ModelParams load_model(const std::string& path);

}  // namespace slate
