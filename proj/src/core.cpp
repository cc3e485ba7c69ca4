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

#include "backbone/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "backbone/parallel.hpp"

namespace backbone {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      words_per_row_((cols + kWordBits - 1) / kWordBits),
      words_(rows * words_per_row_, 0) {}

void BitMatrix::set(std::size_t i, std::size_t j, bool value) {
  Word& w = words_[i * words_per_row_ + j / kWordBits];
  const Word mask = Word{1} << (j % kWordBits);
  if (value)
    w |= mask;
  else
    w &= ~mask;
}

std::size_t BitMatrix::row_count(std::size_t i) const {
  std::size_t n = 0;
  for (Word w : row_words(i)) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t BitMatrix::overlap(std::size_t i, std::size_t k) const {
  const Word* a = words_.data() + i * words_per_row_;
  const Word* b = words_.data() + k * words_per_row_;
  std::size_t n = 0;
  for (std::size_t w = 0; w < words_per_row_; ++w)
    n += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
  return n;
}

namespace {

std::unordered_map<std::string, std::size_t> build_lookup(
    const std::vector<std::string>& labels, const char* axis) {
  std::unordered_map<std::string, std::size_t> lookup;
  lookup.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!lookup.emplace(labels[i], i).second)
      throw std::invalid_argument(std::string("duplicate ") + axis +
                                  " label: " + labels[i]);
  }
  return lookup;
}

std::vector<std::string> default_labels(char prefix, std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    labels.push_back(prefix + std::to_string(i));
  return labels;
}

}  // namespace

BipartiteGraph::BipartiteGraph(BitMatrix entries,
                               std::vector<std::string> row_labels,
                               std::vector<std::string> col_labels)
    : entries_(std::move(entries)),
      row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)) {
  if (entries_.rows() == 0 || entries_.cols() == 0)
    throw std::invalid_argument("bipartite graph needs at least one row and column");
  if (row_labels_.size() != entries_.rows())
    throw std::invalid_argument("row label count does not match row count");
  if (col_labels_.size() != entries_.cols())
    throw std::invalid_argument("column label count does not match column count");
  row_lookup_ = build_lookup(row_labels_, "row");
  build_lookup(col_labels_, "column");
}

BipartiteGraph BipartiteGraph::from_rows(
    const std::vector<std::vector<int>>& rows,
    std::vector<std::string> row_labels, std::vector<std::string> col_labels) {
  const std::size_t m = rows.size();
  const std::size_t n = m == 0 ? 0 : rows.front().size();
  BitMatrix bits(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != n)
      throw std::invalid_argument("ragged row " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      const int v = rows[i][j];
      if (v != 0 && v != 1)
        throw std::invalid_argument("non-binary entry at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
      bits.set(i, j, v == 1);
    }
  }
  if (row_labels.empty()) row_labels = default_labels('r', m);
  if (col_labels.empty()) col_labels = default_labels('c', n);
  return BipartiteGraph(std::move(bits), std::move(row_labels),
                        std::move(col_labels));
}

std::size_t BipartiteGraph::row_index(const std::string& label) const {
  auto it = row_lookup_.find(label);
  if (it == row_lookup_.end())
    throw std::out_of_range("unknown row label: " + label);
  return it->second;
}

std::int64_t BipartiteGraph::total() const {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < rows(); ++i)
    n += static_cast<std::int64_t>(entries_.row_count(i));
  return n;
}

Projection::Projection(Matrix<std::int64_t> weights,
                       std::vector<std::string> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  if (weights_.rows() != weights_.cols())
    throw std::invalid_argument("projection must be square");
  if (labels_.size() != weights_.rows())
    throw std::invalid_argument("projection label count does not match size");
  lookup_ = build_lookup(labels_, "projection");
}

std::size_t Projection::index(const std::string& label) const {
  auto it = lookup_.find(label);
  if (it == lookup_.end())
    throw std::out_of_range("unknown projection label: " + label);
  return it->second;
}

Matrix<std::int64_t> co_occurrence(const BitMatrix& bits) {
  const std::size_t m = bits.rows();
  Matrix<std::int64_t> g(m, m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    g(i, i) = static_cast<std::int64_t>(bits.row_count(i));
    for (std::size_t k = i + 1; k < m; ++k) {
      const auto w = static_cast<std::int64_t>(bits.overlap(i, k));
      g(i, k) = w;
      g(k, i) = w;
    }
  }
  return g;
}

Projection project(const BipartiteGraph& b) {
  const std::size_t m = b.rows();
  Matrix<std::int64_t> g(m, m, 0);
  // Each worker owns whole rows of the upper triangle, so writes never alias.
  parallel_for(m, 0, [&](std::size_t i, std::size_t) {
    const auto& bits = b.bits();
    g(i, i) = static_cast<std::int64_t>(bits.row_count(i));
    for (std::size_t k = i + 1; k < m; ++k)
      g(i, k) = static_cast<std::int64_t>(bits.overlap(i, k));
  });
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i + 1; k < m; ++k) g(k, i) = g(i, k);
  return Projection(std::move(g), b.row_labels());
}

Margins margins(const BipartiteGraph& b) {
  Margins out{MarginVector(b.rows(), 0), MarginVector(b.cols(), 0)};
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      if (b.at(i, j)) {
        ++out.row[i];
        ++out.col[j];
      }
    }
  }
  return out;
}

WeightBounds edge_weight_bounds(std::int64_t degree_i, std::int64_t degree_j,
                                std::int64_t artifact_count) {
  const std::int64_t lo_deg = std::min(degree_i, degree_j);
  const std::int64_t hi_deg = std::max(degree_i, degree_j);
  if (artifact_count < hi_deg)
    throw std::invalid_argument("artifact count smaller than a row degree");
  const std::int64_t forced = lo_deg - (artifact_count - hi_deg);
  return {std::max<std::int64_t>(0, forced), lo_deg};
}

Matrix<WeightBounds> edge_weight_bounds(const Projection& g,
                                        std::int64_t artifact_count) {
  const std::size_t m = g.size();
  for (std::size_t i = 0; i < m; ++i)
    if (g.weight(i, i) > artifact_count)
      throw std::invalid_argument(
          "artifact count " + std::to_string(artifact_count) +
          " is smaller than the degree of " + g.labels()[i]);
  Matrix<WeightBounds> out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    out(i, i) = {g.weight(i, i), g.weight(i, i)};
    for (std::size_t j = i + 1; j < m; ++j) {
      out(i, j) = edge_weight_bounds(g.weight(i, i), g.weight(j, j), artifact_count);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

double skewness(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("skewness of an empty sequence");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

double skewness(std::span<const std::int64_t> values) {
  std::vector<double> d(values.begin(), values.end());
  return skewness(std::span<const double>(d));
}

}  // namespace backbone
