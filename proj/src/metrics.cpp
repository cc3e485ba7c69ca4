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

#include "backbone/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace backbone {

double modularity(const Backbone& b, const Partition& p) {
  const std::size_t m = b.size();
  std::vector<int> community(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto it = p.assignment.find(b.labels[i]);
    if (it == p.assignment.end())
      throw std::invalid_argument("partition does not cover node " + b.labels[i]);
    community[i] = it->second;
  }

  std::map<int, double> internal;  // L_c
  std::map<int, double> degree;    // D_c
  double edges = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (b.at(i, j) <= 0) continue;
      edges += 1.0;
      degree[community[i]] += 1.0;
      degree[community[j]] += 1.0;
      if (community[i] == community[j]) internal[community[i]] += 1.0;
    }
  }
  if (edges == 0.0) return 0.0;
  double q = 0.0;
  for (const auto& [c, d] : degree) {
    const double share = d / (2.0 * edges);
    q += internal[c] / edges - share * share;
  }
  return q;
}

Correlation backbone_correlation(const Backbone& b1, const Backbone& b2, bool binary) {
  const std::size_t m = b1.size();
  if (b2.size() != m) throw std::invalid_argument("backbones have different node sets");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m; ++i) index.emplace(b2.labels[i], i);
  std::vector<std::size_t> align(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto it = index.find(b1.labels[i]);
    if (it == index.end())
      throw std::invalid_argument("backbones have different node sets: " + b1.labels[i]);
    align[i] = it->second;
  }

  auto value = [binary](int v) { return binary ? static_cast<double>(v != 0) : v; };
  double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double x = value(b1.at(i, j));
      const double y = value(b2.at(align[i], align[j]));
      n += 1;
      sx += x;
      sy += y;
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
    }
  }
  Correlation out;
  const double vx = n * sxx - sx * sx;
  const double vy = n * syy - sy * sy;
  if (n == 0 || vx <= 0 || vy <= 0) {
    out.degenerate = true;
    return out;
  }
  out.r = std::clamp((n * sxy - sx * sy) / std::sqrt(vx * vy), -1.0, 1.0);
  return out;
}

double density(const Backbone& b) {
  const std::size_t m = b.size();
  if (m < 2) throw std::invalid_argument("density needs at least two nodes");
  return static_cast<double>(b.positive_edges()) /
         (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

}  // namespace backbone
