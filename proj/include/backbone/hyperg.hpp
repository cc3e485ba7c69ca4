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

#ifndef BACKBONE_HYPERG_HPP_
#define BACKBONE_HYPERG_HPP_

#include <cstdint>
#include <vector>

#include "backbone/core.hpp"
#include "backbone/result.hpp"

namespace backbone {

enum class Tail { kUpper, kLower };

// Tails of the hypergeometric distribution with population N, n draws and K
// successes in the population:
//   upper: P(X >= k),  lower: P(X <= k)
//
// Terms are evaluated in log space from a log-factorial table and normalized
// by the mass of the whole support, so upper(k) + lower(k) - P(X = k) == 1 up
// to rounding.
class HypergeometricTable {
 public:
  // Supports populations up to max_population.
  explicit HypergeometricTable(std::int64_t max_population);

  // Throws std::invalid_argument unless 0 <= k <= min(n, K) and n, K <= N,
  // with N within the table.
  double tail(std::int64_t k, std::int64_t population, std::int64_t draws,
              std::int64_t successes, Tail tail) const;

  // Both tails at once: {upper, lower}.
  std::pair<double, double> tails(std::int64_t k, std::int64_t population,
                                  std::int64_t draws, std::int64_t successes) const;

  double log_choose(std::int64_t n, std::int64_t k) const {
    return log_factorial_[n] - log_factorial_[k] - log_factorial_[n - k];
  }

 private:
  void check(std::int64_t k, std::int64_t population, std::int64_t draws,
             std::int64_t successes) const;

  std::vector<double> log_factorial_;
};

// One-off evaluation; builds a table sized to `population`.
double hypergeom_tail(std::int64_t k, std::int64_t population, std::int64_t draws,
                      std::int64_t successes, Tail tail);

// Hypergeometric null model: row sums fixed, column sums free. For i != j the
// overlap G_ij is tested against Hypergeometric(N = |W|, n = R_i, K = R_j).
NullModelResult hyperg(const BipartiteGraph& b);

}  // namespace backbone

#endif  // BACKBONE_HYPERG_HPP_
