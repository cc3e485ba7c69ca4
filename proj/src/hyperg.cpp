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

#include "backbone/hyperg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "backbone/parallel.hpp"

namespace backbone {

HypergeometricTable::HypergeometricTable(std::int64_t max_population) {
  if (max_population < 0)
    throw std::invalid_argument("population must be nonnegative");
  log_factorial_.resize(static_cast<std::size_t>(max_population) + 1);
  for (std::int64_t i = 0; i <= max_population; ++i)
    log_factorial_[i] = std::lgamma(static_cast<double>(i) + 1.0);
}

void HypergeometricTable::check(std::int64_t k, std::int64_t population,
                                std::int64_t draws, std::int64_t successes) const {
  if (population < 0 || population >= static_cast<std::int64_t>(log_factorial_.size()))
    throw std::invalid_argument("population " + std::to_string(population) +
                                " outside the table");
  if (draws < 0 || successes < 0 || draws > population || successes > population)
    throw std::invalid_argument("hypergeometric draws/successes must lie in [0, N]");
  if (k < 0 || k > std::min(draws, successes))
    throw std::invalid_argument("hypergeometric k must lie in [0, min(n, K)]");
}

std::pair<double, double> HypergeometricTable::tails(std::int64_t k,
                                                     std::int64_t population,
                                                     std::int64_t draws,
                                                     std::int64_t successes) const {
  check(k, population, draws, successes);
  // The distribution is symmetric in (n, K); a canonical order makes the
  // rounded result symmetric too.
  if (draws > successes) std::swap(draws, successes);
  const std::int64_t lo = std::max<std::int64_t>(0, draws + successes - population);
  const std::int64_t hi = std::min(draws, successes);
  if (k < lo) return {1.0, 0.0};  // below the support: X >= k surely

  // log P(X = x) without the constant C(N, n); shifting by the maximum keeps
  // exp() in range and the constant cancels in the normalization.
  auto log_term = [&](std::int64_t x) {
    return log_choose(successes, x) + log_choose(population - successes, draws - x);
  };
  double peak = -INFINITY;
  for (std::int64_t x = lo; x <= hi; ++x) peak = std::max(peak, log_term(x));

  double below = 0.0;  // x < k
  double at = 0.0;     // x == k
  double above = 0.0;  // x > k
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double w = std::exp(log_term(x) - peak);
    if (x < k)
      below += w;
    else if (x == k)
      at += w;
    else
      above += w;
  }
  const double total = below + at + above;
  const double upper = std::min(1.0, (at + above) / total);
  const double lower = std::min(1.0, (below + at) / total);
  return {upper, lower};
}

double HypergeometricTable::tail(std::int64_t k, std::int64_t population,
                                 std::int64_t draws, std::int64_t successes,
                                 Tail tail) const {
  const auto [upper, lower] = tails(k, population, draws, successes);
  return tail == Tail::kUpper ? upper : lower;
}

double hypergeom_tail(std::int64_t k, std::int64_t population, std::int64_t draws,
                      std::int64_t successes, Tail tail) {
  return HypergeometricTable(std::max<std::int64_t>(population, 0))
      .tail(k, population, draws, successes, tail);
}

NullModelResult hyperg(const BipartiteGraph& b) {
  Stopwatch clock;
  const Projection g = project(b);
  const std::size_t m = b.rows();
  const auto population = static_cast<std::int64_t>(b.cols());
  const HypergeometricTable table(population);

  NullModelResult r;
  r.positive = Matrix<double>(m, m, 1.0);
  r.negative = Matrix<double>(m, m, 1.0);
  r.row_labels = b.row_labels();
  parallel_for(m, 0, [&](std::size_t i, std::size_t) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto [upper, lower] =
          table.tails(g.weight(i, j), population, g.weight(i, i), g.weight(j, j));
      r.positive(i, j) = upper;
      r.negative(i, j) = lower;
    }
  });
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      r.positive(j, i) = r.positive(i, j);
      r.negative(j, i) = r.negative(i, j);
    }
  }
  r.summary = make_summary(b, "hypergeometric");
  r.summary.runtime_seconds = clock.seconds();
  return r;
}

}  // namespace backbone
