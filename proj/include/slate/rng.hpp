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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace slate {

// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit counter
// and a 64-bit key to 128 pseudo-random bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// What a stream is used for. Part of the stream key so that different draws in
// the same round never share random bits.
enum class DrawKind : std::uint32_t {
  kPositiveBatch = 1,
  kInnerBatch = 2,
  kSgdBatch = 3,
  kInit = 4,
  kData = 5,
  kProbe = 6,
};

// Counter-based random stream. Every stream is fully determined by
// (seed, node, round, kind), so per-node work can run in any order or on any
// thread with identical results.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t node, std::uint32_t round,
            DrawKind kind);
  // Convenience for single-purpose streams (data generation, partitioning).
  explicit RngStream(std::uint64_t seed, DrawKind kind = DrawKind::kData)
      : RngStream(seed, 0, 0, kind) {}

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller.
  double normal();
  // Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n);

  // k distinct indices from [0, n) when k <= n, else k draws with
  // replacement. Order of the result is part of the stream contract.
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  PhiloxKey key_;
  PhiloxCounter counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;  // 32-bit words consumed from block_
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Hands out per-node streams for a run. With share_nodes set every node gets
// node 0's streams, which is how identical-shard equivalence runs are built.
struct StreamFactory {
  std::uint64_t seed = 0;
  bool share_nodes = false;

  RngStream make(std::size_t node, std::size_t round, DrawKind kind) const {
    return RngStream(seed, share_nodes ? 0u : static_cast<std::uint32_t>(node),
                     static_cast<std::uint32_t>(round), kind);
  }
};

}  // namespace slate
