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

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "slate/error.hpp"
#include "slate/sim.hpp"

namespace slate {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'",
                                  key, v));
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
  return out;
}

bool to_flag(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

std::string fmt_real(double v) { return fmt::format("{}", v); }
std::string fmt_flag(bool v) { return v ? "true" : "false"; }

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define SLATE_COUNT(expr)                                                   \
  Field {                                                                   \
    [](ExperimentConfig& c, const std::string& k, const std::string& v) {   \
      c.expr = to_count(k, v);                                              \
    },                                                                      \
        [](const ExperimentConfig& c) { return std::to_string(c.expr); }    \
  }
#define SLATE_REAL(expr)                                                    \
  Field {                                                                   \
    [](ExperimentConfig& c, const std::string& k, const std::string& v) {   \
      c.expr = to_real(k, v);                                               \
    },                                                                      \
        [](const ExperimentConfig& c) { return fmt_real(c.expr); }          \
  }
#define SLATE_FLAG(expr)                                                    \
  Field {                                                                   \
    [](ExperimentConfig& c, const std::string& k, const std::string& v) {   \
      c.expr = to_flag(k, v);                                               \
    },                                                                      \
        [](const ExperimentConfig& c) { return fmt_flag(c.expr); }          \
  }
#define SLATE_TEXT(expr)                                                    \
  Field {                                                                   \
    [](ExperimentConfig& c, const std::string&, const std::string& v) {     \
      c.expr = v;                                                           \
    },                                                                      \
        [](const ExperimentConfig& c) { return c.expr; }                    \
  }

// Ordered so write_config emits top-level keys before sectioned ones.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"seed",
       Field{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
               c.seed = to_count(k, v);
             },
             [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"rounds", SLATE_COUNT(rounds)},
      {"eval_every", SLATE_COUNT(eval_every)},
      {"n_nodes", SLATE_COUNT(n_nodes)},
      {"partition",
       Field{[](ExperimentConfig& c, const std::string&, const std::string& v) {
               c.partition = parse_partition_scheme(v);
             },
             [](const ExperimentConfig& c) { return to_string(c.partition); }}},
      {"drop_frac", SLATE_REAL(drop_frac)},
      {"scale", SLATE_FLAG(scale)},
      {"threads", SLATE_COUNT(threads)},
      {"timing", SLATE_FLAG(timing)},
      {"output", SLATE_TEXT(output)},
      {"model_out", SLATE_TEXT(model_out)},
      {"test_out", SLATE_TEXT(test_out)},

      {"data.path", SLATE_TEXT(data_path)},
      {"data.n", SLATE_COUNT(synth_n)},
      {"data.dim", SLATE_COUNT(synth_dim)},
      {"data.pos_frac", SLATE_REAL(synth_pos_frac)},
      {"data.separation", SLATE_REAL(synth_separation)},
      {"data.test_path", SLATE_TEXT(test_path)},
      {"data.holdout", SLATE_REAL(holdout)},

      {"model.kind",
       Field{[](ExperimentConfig& c, const std::string&, const std::string& v) {
               c.model = parse_model_kind(v);
             },
             [](const ExperimentConfig& c) { return to_string(c.model); }}},
      {"model.hidden", SLATE_COUNT(hidden)},

      {"algorithm.name",
       Field{[](ExperimentConfig& c, const std::string&, const std::string& v) {
               c.algorithm = parse_algorithm(v);
             },
             [](const ExperimentConfig& c) { return to_string(c.algorithm); }}},
      {"algorithm.eta", SLATE_REAL(opt.eta)},
      {"algorithm.b", SLATE_COUNT(opt.b)},
      {"algorithm.m", SLATE_COUNT(opt.m)},
      {"algorithm.margin", SLATE_REAL(opt.surrogate.margin)},
      {"algorithm.g2_floor", SLATE_REAL(opt.surrogate.g2_floor)},
      {"algorithm.include_anchor", SLATE_FLAG(opt.surrogate.include_anchor)},
      {"algorithm.tracking", SLATE_FLAG(opt.gradient_tracking)},
      {"algorithm.alpha", SLATE_REAL(opt.alpha)},
      {"algorithm.init_batch", SLATE_COUNT(opt.init_batch)},
      {"algorithm.batch", SLATE_COUNT(dpsgd_batch)},

      {"topology.kind",
       Field{[](ExperimentConfig& c, const std::string&, const std::string& v) {
               c.topology = parse_topology_kind(v);
             },
             [](const ExperimentConfig& c) { return to_string(c.topology); }}},
      {"topology.q", SLATE_COUNT(period_q)},
      {"topology.path", SLATE_TEXT(topology_path)},
  };
  return table;
}

#undef SLATE_COUNT
#undef SLATE_REAL
#undef SLATE_FLAG
#undef SLATE_TEXT

const Field& find_field(const std::string& key) {
  for (const auto& [name, field] : fields())
    if (name == key) return field;
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, field] : fields()) keys.push_back(name);
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& dotted_key,
                      const std::string& value) {
  find_field(dotted_key).set(cfg, dotted_key, value);
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("unterminated section header", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "data" && section != "model" && section != "algorithm" &&
          section != "topology")
        throw ParseError("unknown section [" + section + "]", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string dotted = section.empty() ? key : section + "." + key;
    try {
      set_config_value(cfg, dotted, value);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  std::string current;
  for (const auto& [name, field] : fields()) {
    const auto dot = name.find('.');
    const std::string section = dot == std::string::npos ? "" : name.substr(0, dot);
    const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
    if (section != current) {
      out << "\n[" << section << "]\n";
      current = section;
    }
    out << key << " = " << field.get(cfg) << '\n';
  }
}

}  // namespace slate
