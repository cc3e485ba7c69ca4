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

#ifndef BACKBONE_METRICS_HPP_
#define BACKBONE_METRICS_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "backbone/extract.hpp"

namespace backbone {

// Community assignment keyed by node label.
struct Partition {
  std::unordered_map<std::string, int> assignment;
};

// Newman-Girvan modularity of the positive edges of b:
//   Q = sum_c [ L_c / E - (D_c / 2E)^2 ]
// 0 when there are no positive edges. Throws std::invalid_argument when a
// node of b is missing from the partition.
double modularity(const Backbone& b, const Partition& p);

struct Correlation {
  double r = 0.0;
  // Set when either vector is constant and r was reported as 0.
  bool degenerate = false;
};

// Pearson correlation of the upper-triangle entries, with b2 aligned to b1
// by label. `binary` maps every nonzero entry to 1 first.
// Throws std::invalid_argument when the label sets differ.
Correlation backbone_correlation(const Backbone& b1, const Backbone& b2,
                                 bool binary = false);

// Positive edges over m(m-1)/2. Throws std::invalid_argument when m < 2.
double density(const Backbone& b);

}  // namespace backbone

#endif  // BACKBONE_METRICS_HPP_
