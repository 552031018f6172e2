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

namespace slate {

struct Sample {
  std::vector<double> features;
  int label = -1;  // +1 or -1

  bool positive() const { return label > 0; }
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t dim = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  const Sample& operator[](std::size_t i) const { return samples[i]; }

  // Indices of the positive samples, ascending.
  std::vector<std::size_t> positive_indices() const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

struct DatasetStats {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t positives = 0;
  double pos_frac = 0.0;
};

// One list of sample indices per node.
struct Partition {
  std::vector<std::vector<std::size_t>> shards;

  std::size_t n_nodes() const { return shards.size(); }
};

enum class PartitionScheme { kIid, kLabelSkew };

PartitionScheme parse_partition_scheme(const std::string& name);
std::string to_string(PartitionScheme scheme);

// LIBSVM / svmlight text: `<label> <idx>:<val> ...` with 1-based ascending
// indices. Labels 0 and -1 both map to -1. Rows are densified; the resulting
// dim is max(max index seen, min_dim). `#` starts a comment.
Dataset parse_libsvm(std::istream& in, std::size_t min_dim = 0);
Dataset parse_libsvm(const std::string& text, std::size_t min_dim = 0);
Dataset load_libsvm(const std::string& path, std::size_t min_dim = 0);

// Writes nonzero features with round-trip precision.
void write_libsvm(std::ostream& out, const Dataset& ds);
void save_libsvm(const std::string& path, const Dataset& ds);

// Two isotropic unit-variance Gaussians centred at +/- separation/sqrt(dim)
// along the all-ones direction. Exactly round(n * pos_frac) positives,
// clamped to [1, n - 1], placed at seeded random positions.
Dataset gen_synthetic(std::size_t n, std::size_t dim, double pos_frac,
                      double separation, std::uint64_t seed);

// Removes round(drop_frac * P) positives chosen uniformly, always leaving at
// least one. Negatives and sample order are untouched.
Dataset drop_positives(const Dataset& ds, double drop_frac, std::uint64_t seed);

// Per-coordinate min-max parameters fitted on one dataset and applicable to
// another (train statistics on a test split).
struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  static MinMaxScaler fit(const Dataset& ds);
  Dataset apply(const Dataset& ds) const;
};

// Min-max scaling to [0, 1]; constant coordinates become 0.
Dataset scale_features(const Dataset& ds);

// Splits indices across nodes and then repairs shards that lack a positive
// by moving one positive from a shard that has more than one.
Partition partition(const Dataset& ds, std::size_t n_nodes,
                    PartitionScheme scheme, std::uint64_t seed);

DatasetStats dataset_stats(const Dataset& ds);

}  // namespace slate
