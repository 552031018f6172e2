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

#include "slate/model.hpp"

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
namespace {

void check_input(const ModelParams& p, std::span<const double> z) {
  if (z.size() != p.spec.input_dim)
    throw ContractError(fmt::format("model expects {} features, got {}",
                                    p.spec.input_dim, z.size()));
  if (p.theta.size() != p.spec.param_count())
    throw ContractError("model parameter vector does not match its spec");
}

}  // namespace

ModelKind parse_model_kind(const std::string& name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "mlp") return ModelKind::kMlp;
  throw ConfigError("unknown model kind '" + name +
                    "' (expected linear or mlp)");
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kLinear ? "linear" : "mlp";
}

std::size_t ModelSpec::param_count() const {
  if (kind == ModelKind::kLinear) return input_dim + 1;
  return hidden_dim * input_dim + hidden_dim + hidden_dim + 1;
}

ModelParams zero_params(const ModelSpec& spec) {
  if (spec.input_dim < 1 || (spec.kind == ModelKind::kMlp && spec.hidden_dim < 1))
    throw ContractError("model dimensions must be >= 1");
  return ModelParams{spec, std::vector<double>(spec.param_count(), 0.0)};
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
  ModelParams p = zero_params(spec);
  RngStream rng(seed, DrawKind::kInit);
  const double d = static_cast<double>(spec.input_dim);
  if (spec.kind == ModelKind::kLinear) {
    const double sd = std::sqrt(2.0 / (d + 1.0));
    for (std::size_t j = 0; j < spec.input_dim; ++j) p.theta[j] = sd * rng.normal();
    return p;
  }
  const std::size_t h = spec.hidden_dim;
  const double hd = static_cast<double>(h);
  const double sd1 = std::sqrt(2.0 / (d + hd));
  const double sd2 = std::sqrt(2.0 / (hd + 1.0));
  const std::size_t w1 = h * spec.input_dim;
  for (std::size_t k = 0; k < w1; ++k) p.theta[k] = sd1 * rng.normal();
  for (std::size_t k = 0; k < h; ++k) p.theta[w1 + h + k] = sd2 * rng.normal();
  return p;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double logit(const ModelParams& p, std::span<const double> z) {
  check_input(p, z);
  const auto& th = p.theta;
  const std::size_t d = p.spec.input_dim;
  if (p.spec.kind == ModelKind::kLinear) {
    double acc = th[d];
    for (std::size_t j = 0; j < d; ++j) acc += th[j] * z[j];
    return acc;
  }
  const std::size_t h = p.spec.hidden_dim;
  const double* b1 = th.data() + h * d;
  const double* w2 = b1 + h;
  double out = w2[h];
  for (std::size_t k = 0; k < h; ++k) {
    const double* row = th.data() + k * d;
    double a = b1[k];
    for (std::size_t j = 0; j < d; ++j) a += row[j] * z[j];
    if (a > 0.0) out += w2[k] * a;
  }
  return out;
}

double logit_and_grad(const ModelParams& p, std::span<const double> z,
                      std::span<double> grad) {
  check_input(p, z);
  if (grad.size() != p.theta.size())
    throw ContractError("gradient buffer does not match parameter count");
  const auto& th = p.theta;
  const std::size_t d = p.spec.input_dim;
  if (p.spec.kind == ModelKind::kLinear) {
    double acc = th[d];
    for (std::size_t j = 0; j < d; ++j) {
      acc += th[j] * z[j];
      grad[j] = z[j];
    }
    grad[d] = 1.0;
    return acc;
  }
  const std::size_t h = p.spec.hidden_dim;
  const std::size_t off_b1 = h * d;
  const std::size_t off_w2 = off_b1 + h;
  const double* b1 = th.data() + off_b1;
  const double* w2 = th.data() + off_w2;
  double out = w2[h];
  for (std::size_t k = 0; k < h; ++k) {
    const double* row = th.data() + k * d;
    double a = b1[k];
    for (std::size_t j = 0; j < d; ++j) a += row[j] * z[j];
    double* grow = grad.data() + k * d;
    // relu'(0) is taken as 0.
    if (a > 0.0) {
      out += w2[k] * a;
      for (std::size_t j = 0; j < d; ++j) grow[j] = w2[k] * z[j];
      grad[off_b1 + k] = w2[k];
      grad[off_w2 + k] = a;
    } else {
      for (std::size_t j = 0; j < d; ++j) grow[j] = 0.0;
      grad[off_b1 + k] = 0.0;
      grad[off_w2 + k] = 0.0;
    }
  }
  grad[off_w2 + h] = 1.0;
  return out;
}

double score(const ModelParams& p, std::span<const double> z) {
  return sigmoid(logit(p, z));
}

double score_and_grad(const ModelParams& p, std::span<const double> z,
                      std::span<double> grad) {
  const double h = sigmoid(logit_and_grad(p, z, grad));
  const double dh = h * (1.0 - h);
  for (auto& g : grad) g *= dh;
  return h;
}

ScoreGrad score_and_grad(const ModelParams& p, std::span<const double> z) {
  ScoreGrad out;
  out.grad.resize(p.theta.size());
  out.h = score_and_grad(p, z, out.grad);
  return out;
}

void write_model(std::ostream& out, const ModelParams& p) {
  if (p.spec.kind == ModelKind::kLinear)
    out << fmt::format("linear {}\n", p.spec.input_dim);
  else
    out << fmt::format("mlp {} {}\n", p.spec.input_dim, p.spec.hidden_dim);
  for (std::size_t k = 0; k < p.theta.size(); ++k)
    out << fmt::format("{:.17g}{}", p.theta[k],
                       k + 1 == p.theta.size() ? "\n" : " ");
}

ModelParams read_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing model header", 1);
  std::istringstream hs(header);
  std::string kind;
  ModelSpec spec;
  hs >> kind;
  if (kind == "linear") {
    spec.kind = ModelKind::kLinear;
    if (!(hs >> spec.input_dim) || spec.input_dim == 0)
      throw ParseError("bad linear model header '" + header + "'", 1);
  } else if (kind == "mlp") {
    spec.kind = ModelKind::kMlp;
    if (!(hs >> spec.input_dim >> spec.hidden_dim) || spec.input_dim == 0 ||
        spec.hidden_dim == 0)
      throw ParseError("bad mlp model header '" + header + "'", 1);
  } else {
    throw ParseError("unknown model kind '" + kind + "'", 1);
  }
  ModelParams p = zero_params(spec);
  for (std::size_t k = 0; k < p.theta.size(); ++k) {
    std::string tok;
    if (!(in >> tok))
      throw ParseError(fmt::format("expected {} parameters, got {}",
                                   p.theta.size(), k),
                       2);
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, p.theta[k]);
    if (ec != std::errc() || ptr != end || !std::isfinite(p.theta[k]))
      throw ParseError("non-numeric parameter '" + tok + "'", 2);
  }
  std::string extra;
  if (in >> extra) throw ParseError("trailing data after parameters", 2);
  return p;
}

void save_model(const std::string& path, const ModelParams& p) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_model(out, p);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_model(in);
}

}  // namespace slate
