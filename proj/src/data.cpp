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

#include "slate/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

#include "slate/error.hpp"
#include "slate/rng.hpp"

namespace slate {
namespace {

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_index(std::string_view tok, std::size_t& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

struct SparseRow {
  int label;
  std::vector<std::pair<std::size_t, double>> entries;
};

}  // namespace

std::vector<std::size_t> Dataset::positive_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].positive()) out.push_back(i);
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.dim = dim;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) out.samples.push_back(samples.at(i));
  return out;
}

PartitionScheme parse_partition_scheme(const std::string& name) {
  if (name == "iid") return PartitionScheme::kIid;
  if (name == "label_skew") return PartitionScheme::kLabelSkew;
  throw ConfigError("unknown partition scheme '" + name +
                    "' (expected iid or label_skew)");
}

std::string to_string(PartitionScheme scheme) {
  return scheme == PartitionScheme::kIid ? "iid" : "label_skew";
}

Dataset parse_libsvm(std::istream& in, std::size_t min_dim) {
  std::vector<SparseRow> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    auto toks = split_ws(view);
    if (toks.empty()) continue;

    double y;
    if (!parse_double(toks[0], y))
      throw ParseError(fmt::format("non-numeric label '{}'", toks[0]), lineno);
    SparseRow row;
    if (y == 1.0) {
      row.label = 1;
    } else if (y == -1.0 || y == 0.0) {
      row.label = -1;
    } else {
      throw ParseError(fmt::format("label {} is not one of +1, -1, 0", y),
                       lineno);
    }

    std::size_t prev = 0;
    for (std::size_t t = 1; t < toks.size(); ++t) {
      auto colon = toks[t].find(':');
      if (colon == std::string_view::npos)
        throw ParseError(fmt::format("expected idx:val, got '{}'", toks[t]),
                         lineno);
      std::size_t idx;
      double val;
      if (!parse_index(toks[t].substr(0, colon), idx) || idx == 0)
        throw ParseError(fmt::format("bad feature index in '{}'", toks[t]),
                         lineno);
      if (!parse_double(toks[t].substr(colon + 1), val))
        throw ParseError(fmt::format("non-numeric value in '{}'", toks[t]),
                         lineno);
      if (idx <= prev)
        throw ParseError(
            fmt::format("feature index {} not ascending (after {})", idx, prev),
            lineno);
      prev = idx;
      row.entries.emplace_back(idx, val);
    }
    max_index = std::max(max_index, prev);
    rows.push_back(std::move(row));
  }

  Dataset ds;
  ds.dim = std::max(max_index, min_dim);
  ds.samples.reserve(rows.size());
  for (auto& row : rows) {
    Sample s;
    s.label = row.label;
    s.features.assign(ds.dim, 0.0);
    for (auto [idx, val] : row.entries) s.features[idx - 1] = val;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Dataset parse_libsvm(const std::string& text, std::size_t min_dim) {
  std::istringstream in(text);
  return parse_libsvm(in, min_dim);
}

Dataset load_libsvm(const std::string& path, std::size_t min_dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_libsvm(in, min_dim);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  std::string line;
  for (const auto& s : ds.samples) {
    line = s.positive() ? "+1" : "-1";
    for (std::size_t j = 0; j < s.features.size(); ++j) {
      if (s.features[j] != 0.0)
        line += fmt::format(" {}:{:.17g}", j + 1, s.features[j]);
    }
    line += '\n';
    out << line;
  }
}

void save_libsvm(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_libsvm(out, ds);
}

Dataset gen_synthetic(std::size_t n, std::size_t dim, double pos_frac,
                      double separation, std::uint64_t seed) {
  if (n < 2) throw ContractError("gen_synthetic: n must be >= 2");
  if (dim < 1) throw ContractError("gen_synthetic: dim must be >= 1");
  if (!(pos_frac > 0.0 && pos_frac < 1.0))
    throw ContractError("gen_synthetic: pos_frac must lie in (0, 1)");
  if (!(separation >= 0.0))
    throw ContractError("gen_synthetic: separation must be >= 0");

  auto positives = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * pos_frac));
  positives = std::clamp<std::size_t>(positives, 1, n - 1);

  RngStream rng(seed, DrawKind::kData);
  std::vector<int> labels(n, -1);
  std::fill(labels.begin(), labels.begin() + positives, 1);
  rng.shuffle(labels);

  const double shift = separation / std::sqrt(static_cast<double>(dim));
  Dataset ds;
  ds.dim = dim;
  ds.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample& s = ds.samples[i];
    s.label = labels[i];
    s.features.resize(dim);
    const double mu = s.label > 0 ? shift : -shift;
    for (auto& f : s.features) f = mu + rng.normal();
  }
  return ds;
}

Dataset drop_positives(const Dataset& ds, double drop_frac,
                       std::uint64_t seed) {
  if (!(drop_frac >= 0.0 && drop_frac < 1.0))
    throw ContractError("drop_positives: drop_frac must lie in [0, 1)");
  const auto pos = ds.positive_indices();
  if (pos.empty()) throw ContractError("drop_positives: no positive samples");

  auto drop = static_cast<std::size_t>(
      std::llround(drop_frac * static_cast<double>(pos.size())));
  drop = std::min(drop, pos.size() - 1);
  if (drop == 0) return ds;

  RngStream rng(seed, DrawKind::kData);
  std::vector<char> removed(ds.size(), 0);
  for (std::size_t k : rng.sample(pos.size(), drop)) removed[pos[k]] = 1;

  Dataset out;
  out.dim = ds.dim;
  out.samples.reserve(ds.size() - drop);
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!removed[i]) out.samples.push_back(ds.samples[i]);
  return out;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& ds) {
  MinMaxScaler sc;
  sc.lo.assign(ds.dim, 0.0);
  sc.hi.assign(ds.dim, 0.0);
  if (ds.empty()) return sc;
  sc.lo = ds.samples.front().features;
  sc.hi = ds.samples.front().features;
  for (const auto& s : ds.samples) {
    for (std::size_t j = 0; j < ds.dim; ++j) {
      sc.lo[j] = std::min(sc.lo[j], s.features[j]);
      sc.hi[j] = std::max(sc.hi[j], s.features[j]);
    }
  }
  return sc;
}

Dataset MinMaxScaler::apply(const Dataset& ds) const {
  if (ds.dim != lo.size())
    throw ContractError("MinMaxScaler: dimension mismatch");
  Dataset out = ds;
  for (auto& s : out.samples) {
    for (std::size_t j = 0; j < ds.dim; ++j) {
      const double range = hi[j] - lo[j];
      s.features[j] = range > 0.0 ? (s.features[j] - lo[j]) / range : 0.0;
    }
  }
  return out;
}

Dataset scale_features(const Dataset& ds) {
  if (ds.empty()) throw ContractError("scale_features: empty dataset");
  return MinMaxScaler::fit(ds).apply(ds);
}

Partition partition(const Dataset& ds, std::size_t n_nodes,
                    PartitionScheme scheme, std::uint64_t seed) {
  if (n_nodes == 0) throw ConfigError("partition: n_nodes must be >= 1");
  const std::size_t n_pos = ds.positive_indices().size();
  if (n_pos < n_nodes)
    throw ConfigError(fmt::format(
        "partition: {} positives cannot cover {} nodes", n_pos, n_nodes));

  RngStream rng(seed, DrawKind::kData);
  Partition part;
  part.shards.resize(n_nodes);
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  if (scheme == PartitionScheme::kIid) {
    rng.shuffle(order);
    for (std::size_t k = 0; k < order.size(); ++k)
      part.shards[k % n_nodes].push_back(order[k]);
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return ds[a].label > ds[b].label;
                     });
    const std::size_t base = order.size() / n_nodes;
    const std::size_t extra = order.size() % n_nodes;
    std::size_t at = 0;
    for (std::size_t s = 0; s < n_nodes; ++s) {
      const std::size_t len = base + (s < extra ? 1 : 0);
      part.shards[s].assign(order.begin() + at, order.begin() + at + len);
      at += len;
    }
  }

  // Positive repair.
  auto count_pos = [&](const std::vector<std::size_t>& shard) {
    return static_cast<std::size_t>(std::count_if(
        shard.begin(), shard.end(),
        [&](std::size_t i) { return ds[i].positive(); }));
  };
  for (std::size_t s = 0; s < n_nodes; ++s) {
    if (count_pos(part.shards[s]) > 0) continue;
    std::vector<std::size_t> donors;
    for (std::size_t d = 0; d < n_nodes; ++d)
      if (count_pos(part.shards[d]) > 1) donors.push_back(d);
    auto& donor = part.shards[donors[rng.index(donors.size())]];
    std::vector<std::size_t> slots;
    for (std::size_t k = 0; k < donor.size(); ++k)
      if (ds[donor[k]].positive()) slots.push_back(k);
    const std::size_t slot = slots[rng.index(slots.size())];
    part.shards[s].push_back(donor[slot]);
    donor.erase(donor.begin() + static_cast<std::ptrdiff_t>(slot));
  }
  return part;
}

DatasetStats dataset_stats(const Dataset& ds) {
  DatasetStats st;
  st.n = ds.size();
  st.dim = ds.dim;
  st.positives = ds.positive_indices().size();
  st.pos_frac = st.n == 0 ? 0.0
                          : static_cast<double>(st.positives) /
                                static_cast<double>(st.n);
  return st;
}

}  // namespace slate
