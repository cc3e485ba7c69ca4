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

#include "backbone/extract.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace backbone {

std::string to_string(Fwer fwer) {
  switch (fwer) {
    case Fwer::kNone:
      return "none";
    case Fwer::kBonferroni:
      return "bonferroni";
    case Fwer::kHolm:
      return "holm";
  }
  return "none";
}

Fwer parse_fwer(std::string_view text) {
  if (text == "none") return Fwer::kNone;
  if (text == "bonferroni") return Fwer::kBonferroni;
  if (text == "holm") return Fwer::kHolm;
  throw std::invalid_argument("unknown fwer correction: " + std::string(text));
}

std::size_t Backbone::positive_edges() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) n += entries(i, j) > 0;
  return n;
}

std::size_t Backbone::negative_edges() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) n += entries(i, j) < 0;
  return n;
}

void validate(const Backbone& b) {
  const std::size_t m = b.entries.rows();
  if (b.entries.cols() != m || b.labels.size() != m)
    throw std::invalid_argument("backbone shape does not match labels");
  for (std::size_t i = 0; i < m; ++i) {
    if (b.entries(i, i) != 0) throw std::invalid_argument("backbone has a self-loop");
    for (std::size_t j = 0; j < m; ++j) {
      const int v = b.entries(i, j);
      if (v < -1 || v > 1) throw std::invalid_argument("backbone value outside {-1,0,1}");
      if (v == -1 && !b.provenance.is_signed)
        throw std::invalid_argument("binary backbone contains a negative edge");
      if (v != b.entries(j, i)) throw std::invalid_argument("backbone is not symmetric");
    }
  }
}

namespace {

struct Cell {
  std::size_t i;
  std::size_t j;
};

// Marks which upper-triangle cells are significant in one tail.
std::vector<char> significant(const Matrix<double>& p, const std::vector<Cell>& cells,
                              double budget, Fwer fwer) {
  const std::size_t tests = cells.size();
  std::vector<char> keep(tests, 0);
  switch (fwer) {
    case Fwer::kNone:
    case Fwer::kBonferroni: {
      const double limit = fwer == Fwer::kNone ? budget : budget / static_cast<double>(tests);
      for (std::size_t t = 0; t < tests; ++t)
        keep[t] = p(cells[t].i, cells[t].j) < limit;
      break;
    }
    case Fwer::kHolm: {
      std::vector<std::size_t> order(tests);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p(cells[a].i, cells[a].j) < p(cells[b].i, cells[b].j);
      });
      for (std::size_t rank = 0; rank < tests; ++rank) {
        const Cell& c = cells[order[rank]];
        // rank is 0-based, so l - i + 1 with 1-based i is tests - rank.
        const double limit = budget / static_cast<double>(tests - rank);
        if (!(p(c.i, c.j) <= limit)) break;
        keep[order[rank]] = 1;
      }
      break;
    }
  }
  return keep;
}

}  // namespace

Backbone backbone_extract(const NullModelResult& r, double alpha, bool is_signed,
                          Fwer fwer) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie strictly between 0 and 1");
  validate(r);

  const std::size_t m = r.row_labels.size();
  std::vector<Cell> cells;
  cells.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) cells.push_back({i, j});

  Backbone out;
  out.entries = Matrix<std::int8_t>(m, m, 0);
  out.labels = r.row_labels;
  out.provenance = {r.summary.model_name, alpha, is_signed, fwer};
  if (cells.empty()) return out;

  const double budget = alpha / 2.0;
  const auto upper = significant(r.positive, cells, budget, fwer);
  const auto lower = significant(r.negative, cells, budget, fwer);

  std::size_t conflicts = 0;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    std::int8_t v = 0;
    if (upper[t] && lower[t]) {
      ++conflicts;
    } else if (upper[t]) {
      v = 1;
    } else if (lower[t] && is_signed) {
      v = -1;
    }
    out.entries(cells[t].i, cells[t].j) = v;
    out.entries(cells[t].j, cells[t].i) = v;
  }
  if (conflicts > 0)
    out.warnings.push_back(std::to_string(conflicts) +
                           " cell(s) significant in both tails were set to 0");
  return out;
}

Summary summarize(const NullModelResult& r) {
  validate(r);
  return r.summary;
}

}  // namespace backbone
