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

#ifndef BACKBONE_CORE_HPP_
#define BACKBONE_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace backbone {

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const T> values() const { return data_; }
  std::span<T> values() { return data_; }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Binary matrix with each row packed into 64-bit words. Bits past `cols` in
// the last word of a row are always zero, so popcounts over whole rows are
// exact.
class BitMatrix {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_per_row_; }

  bool get(std::size_t i, std::size_t j) const {
    return (words_[i * words_per_row_ + j / kWordBits] >> (j % kWordBits)) & 1U;
  }
  void set(std::size_t i, std::size_t j, bool value);

  std::span<const Word> row_words(std::size_t i) const {
    return {words_.data() + i * words_per_row_, words_per_row_};
  }
  std::span<Word> row_words(std::size_t i) {
    return {words_.data() + i * words_per_row_, words_per_row_};
  }

  std::size_t row_count(std::size_t i) const;
  std::size_t overlap(std::size_t i, std::size_t k) const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<Word> words_;
};

// Row or column degree sequence.
using MarginVector = std::vector<std::int64_t>;

// Labeled binary biadjacency matrix: rows are agents, columns are artifacts.
class BipartiteGraph {
 public:
  // Throws std::invalid_argument when the shape is empty, labels do not match
  // the shape, or a label repeats within its axis.
  BipartiteGraph(BitMatrix entries, std::vector<std::string> row_labels,
                 std::vector<std::string> col_labels);

  // Convenience constructor from nested rows of 0/1 values, used heavily in
  // tests. Labels default to r0.. and c0.. when omitted.
  static BipartiteGraph from_rows(
      const std::vector<std::vector<int>>& rows,
      std::vector<std::string> row_labels = {},
      std::vector<std::string> col_labels = {});

  std::size_t rows() const { return entries_.rows(); }
  std::size_t cols() const { return entries_.cols(); }
  bool at(std::size_t i, std::size_t j) const { return entries_.get(i, j); }
  const BitMatrix& bits() const { return entries_; }

  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }

  // Throws std::out_of_range for an unknown label.
  std::size_t row_index(const std::string& label) const;

  std::int64_t total() const;

  friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
    return a.entries_ == b.entries_ && a.row_labels_ == b.row_labels_ &&
           a.col_labels_ == b.col_labels_;
  }

 private:
  BitMatrix entries_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  std::unordered_map<std::string, std::size_t> row_lookup_;
};

// Weighted co-occurrence matrix G = B B^T. Diagonal entries are row degrees.
class Projection {
 public:
  Projection(Matrix<std::int64_t> weights, std::vector<std::string> labels);

  std::size_t size() const { return weights_.rows(); }
  std::int64_t weight(std::size_t i, std::size_t j) const {
    return weights_(i, j);
  }
  std::int64_t weight(const std::string& a, const std::string& b) const {
    return weights_(index(a), index(b));
  }
  const Matrix<std::int64_t>& weights() const { return weights_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t index(const std::string& label) const;

 private:
  Matrix<std::int64_t> weights_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct Margins {
  MarginVector row;
  MarginVector col;
};

struct WeightBounds {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const WeightBounds&, const WeightBounds&) = default;
};

// Pairwise row overlaps of a packed matrix; the diagonal holds row counts.
Matrix<std::int64_t> co_occurrence(const BitMatrix& bits);

Projection project(const BipartiteGraph& b);

Margins margins(const BipartiteGraph& b);

// Bounds for a single pair given the two degrees and |W|.
WeightBounds edge_weight_bounds(std::int64_t degree_i, std::int64_t degree_j,
                                std::int64_t artifact_count);

// Bounds for every pair of a projection. Diagonal cells hold (G_ii, G_ii).
// Throws std::invalid_argument if artifact_count is smaller than some degree.
Matrix<WeightBounds> edge_weight_bounds(const Projection& g,
                                        std::int64_t artifact_count);

// Population-normalized sample skewness g1; 0 for constant input.
// Throws std::invalid_argument on an empty sequence.
double skewness(std::span<const double> values);
double skewness(std::span<const std::int64_t> values);

}  // namespace backbone

#endif  // BACKBONE_CORE_HPP_
