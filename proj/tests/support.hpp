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

// Generators and brute-force oracles shared by the unit tests and the
// acceptance binary. Nothing here calls into the library's numerics.

#ifndef BACKBONE_TESTS_SUPPORT_HPP_
#define BACKBONE_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "backbone/core.hpp"
#include "backbone/extract.hpp"
#include "backbone/result.hpp"

namespace backbone::testing {

using Rows = std::vector<std::vector<int>>;

inline Rows random_rows(std::mt19937_64& rng, std::size_t m, std::size_t n, double density) {
  std::bernoulli_distribution coin(density);
  Rows rows(m, std::vector<int>(n));
  for (auto& r : rows)
    for (auto& v : r) v = coin(rng) ? 1 : 0;
  return rows;
}

inline BipartiteGraph random_graph(std::mt19937_64& rng, std::size_t m, std::size_t n,
                                   double density) {
  return BipartiteGraph::from_rows(random_rows(rng, m, n, density));
}

inline Rows to_rows(const BipartiteGraph& b) {
  Rows rows(b.rows(), std::vector<int>(b.cols()));
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) rows[i][j] = b.at(i, j) ? 1 : 0;
  return rows;
}

inline std::vector<std::vector<std::int64_t>> brute_projection(const Rows& rows) {
  const std::size_t m = rows.size();
  std::vector<std::vector<std::int64_t>> g(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < rows[i].size(); ++k) g[i][j] += rows[i][k] * rows[j][k];
  return g;
}

inline int popcount(unsigned v) { return __builtin_popcount(v); }

// P(|S_i ∩ S_j| >= k) and P(<= k) for independent uniform supports of sizes
// ri and rj in n columns, by listing every pair of subsets.
struct EnumeratedTails {
  double upper = 0.0;
  double lower = 0.0;
};
inline EnumeratedTails enumerate_hypergeometric(int n, int ri, int rj, int k) {
  std::vector<unsigned> a, b;
  for (unsigned s = 0; s < (1U << n); ++s) {
    if (popcount(s) == ri) a.push_back(s);
    if (popcount(s) == rj) b.push_back(s);
  }
  double up = 0, lo = 0;
  for (unsigned x : a)
    for (unsigned y : b) {
      const int o = popcount(x & y);
      if (o >= k) up += 1;
      if (o <= k) lo += 1;
    }
  const double total = static_cast<double>(a.size()) * static_cast<double>(b.size());
  return {up / total, lo / total};
}

// Every m x n 0/1 matrix with the given margins, as row bitmasks.
inline std::vector<std::vector<unsigned>> enumerate_fixed_margins(
    const std::vector<int>& row_sums, const std::vector<int>& col_sums) {
  const std::size_t m = row_sums.size();
  const int n = static_cast<int>(col_sums.size());
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> current(m);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == m) {
      for (int j = 0; j < n; ++j) {
        int c = 0;
        for (unsigned r : current) c += (r >> j) & 1U;
        if (c != col_sums[j]) return;
      }
      out.push_back(current);
      return;
    }
    for (unsigned s = 0; s < (1U << n); ++s) {
      if (popcount(s) != row_sums[i]) continue;
      current[i] = s;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

inline std::vector<unsigned> row_masks(const BipartiteGraph& b) {
  std::vector<unsigned> masks(b.rows(), 0);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      if (b.at(i, j)) masks[i] |= 1U << j;
  return masks;
}

inline std::vector<unsigned> row_masks(const BitMatrix& b) {
  std::vector<unsigned> masks(b.rows(), 0);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      if (b.get(i, j)) masks[i] |= 1U << j;
  return masks;
}

// Exact Poisson-binomial pmf by plain full convolution in long double.
inline std::vector<long double> convolution_pmf(const std::vector<double>& p) {
  std::vector<long double> f(p.size() + 1, 0.0L);
  f[0] = 1.0L;
  for (std::size_t t = 0; t < p.size(); ++t) {
    const long double q = p[t];
    for (std::size_t x = t + 1; x > 0; --x) f[x] = f[x] * (1.0L - q) + f[x - 1] * q;
    f[0] *= (1.0L - q);
  }
  return f;
}

// Exact Poisson-binomial pmf by listing all 2^n outcomes.
inline std::vector<double> enumerate_pmf(const std::vector<double>& p) {
  const std::size_t n = p.size();
  std::vector<double> f(n + 1, 0.0);
  for (unsigned s = 0; s < (1U << n); ++s) {
    double w = 1.0;
    for (std::size_t t = 0; t < n; ++t) w *= ((s >> t) & 1U) ? p[t] : 1.0 - p[t];
    f[popcount(s)] += w;
  }
  return f;
}

// A symmetric null model result with unit diagonal and random off-diagonal
// p-values satisfying positive + negative >= 1. Some cells get very small
// values in one tail so every correction fires.
inline NullModelResult random_result(std::mt19937_64& rng, std::size_t m) {
  NullModelResult r;
  r.positive = Matrix<double>(m, m, 1.0);
  r.negative = Matrix<double>(m, m, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      double p = u(rng);
      if (u(rng) < 0.5) p = std::pow(10.0, -6.0 * u(rng));
      double q = 1.0 - p + p * u(rng);
      if (u(rng) < 0.5) std::swap(p, q);
      r.positive(i, j) = r.positive(j, i) = p;
      r.negative(i, j) = r.negative(j, i) = q;
    }
  for (std::size_t i = 0; i < m; ++i) r.row_labels.push_back("n" + std::to_string(i));
  r.summary.model_name = "random";
  r.summary.rows = m;
  return r;
}

// Step-down Holm on one tail, written independently of the library: returns
// the kept cells as (i, j) pairs with i < j.
inline std::vector<std::pair<std::size_t, std::size_t>> holm_oracle(const Matrix<double>& p,
                                                                    double alpha) {
  const std::size_t m = p.rows();
  std::multimap<double, std::pair<std::size_t, std::size_t>> sorted;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) sorted.emplace(p(i, j), std::make_pair(i, j));
  const double l = static_cast<double>(m * (m - 1) / 2);
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  std::size_t rank = 1;
  for (const auto& [value, cell] : sorted) {
    if (!(value <= (alpha / 2.0) / (l - static_cast<double>(rank) + 1.0))) break;
    kept.push_back(cell);
    ++rank;
  }
  return kept;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("backbone-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace backbone::testing

#endif  // BACKBONE_TESTS_SUPPORT_HPP_
