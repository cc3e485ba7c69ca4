// Copyright 2026 The backbone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BACKBONE_FDSM_HPP_
#define BACKBONE_FDSM_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "backbone/core.hpp"
#include "backbone/result.hpp"

namespace backbone {

// mt19937_64 is fully specified by the standard; together with
// uniform_index below this keeps sampling identical across platforms.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Seed for Monte Carlo trial `trial` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial);

// Working matrix of a curveball chain. Margins never change.
struct SamplerState {
  BitMatrix matrix;
  std::uint64_t rng_seed = 0;
  std::uint64_t trades_performed = 0;

  SamplerState() = default;
  SamplerState(BitMatrix m, std::uint64_t seed) : matrix(std::move(m)), rng_seed(seed) {}
};

// Re-partitions the columns that belong to exactly one of the two rows
// uniformly at random, keeping each row's count. Shared columns are
// untouched. Throws std::invalid_argument when row_a == row_b.
void curveball_trade(SamplerState& state, std::size_t row_a, std::size_t row_b,
                     Rng& rng);

// `trades` trades on uniformly chosen row pairs.
void curveball_trades(SamplerState& state, std::size_t trades, Rng& rng);

// A fixed-margin random matrix obtained from b by `trades` trades.
// Throws std::invalid_argument when b has fewer than 2 rows or trades == 0.
BipartiteGraph curveball_sample(const BipartiteGraph& b, std::size_t trades, Rng& rng);

struct FdsmOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  // Row indices of a pair whose sampled weights are recorded.
  std::optional<std::pair<std::size_t, std::size_t>> dyad;
  // Trades between consecutive samples; 0 means 5 * rows.
  std::size_t trades_per_sample = 0;
  // Restart every trial from B instead of continuing one thinned chain.
  bool restart = false;
  std::size_t threads = 0;  // 0: default_thread_count()
};

struct FdsmResult : NullModelResult {
  std::size_t trials = 0;
  std::optional<std::pair<std::size_t, std::size_t>> dyad;
  std::vector<std::int64_t> dyad_values;
};

// Row indices for a pair of row labels. Throws std::out_of_range for an
// unknown label.
std::pair<std::size_t, std::size_t> resolve_dyad(const BipartiteGraph& b,
                                                 const std::string& a,
                                                 const std::string& c);

// Fixed degree sequence model. positive(i, j) is the fraction of sampled
// projections with G*_ij >= G_ij, negative(i, j) the fraction with
// G*_ij <= G_ij. Trial t draws its randomness from derive_seed(seed, t), so
// the result does not depend on the worker count.
//
// Throws std::invalid_argument for trials == 0, fewer than two rows, or a dyad
// index out of range.
FdsmResult fdsm(const BipartiteGraph& b, const FdsmOptions& options);

}  // namespace backbone

#endif  // BACKBONE_FDSM_HPP_
