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

#ifndef BACKBONE_EXTRACT_HPP_
#define BACKBONE_EXTRACT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "backbone/core.hpp"
#include "backbone/result.hpp"

namespace backbone {

// Familywise error rate correction applied within each tail.
enum class Fwer { kNone, kBonferroni, kHolm };

std::string to_string(Fwer fwer);
// Accepts "none", "bonferroni" and "holm". Throws std::invalid_argument.
Fwer parse_fwer(std::string_view text);

struct Provenance {
  std::string model_name;
  std::optional<double> alpha;  // unset for threshold backbones
  bool is_signed = false;
  Fwer fwer = Fwer::kNone;
};

// Symmetric, loop-free adjacency with entries in {-1, 0, 1}.
struct Backbone {
  Matrix<std::int8_t> entries;
  std::vector<std::string> labels;
  Provenance provenance;
  std::vector<std::string> warnings;

  std::size_t size() const { return entries.rows(); }
  std::int8_t at(std::size_t i, std::size_t j) const { return entries(i, j); }
  std::size_t positive_edges() const;
  std::size_t negative_edges() const;
};

// Throws std::invalid_argument when the backbone is asymmetric, has a
// nonzero diagonal, holds a value outside {-1, 0, 1}, or is binary with a -1.
void validate(const Backbone& b);

// Two-tailed test over the m(m-1)/2 upper-triangle cells with a per-tail
// budget of alpha/2.
//
//   none:        keep +1 where positive < alpha/2, -1 where negative < alpha/2
//   bonferroni:  same with budget (alpha/2)/l
//   holm:        per tail, sort the l p-values ascending (stable) and keep
//                p_(i) while p_(i) <= (alpha/2)/(l - i + 1)
//
// A cell that fires in both tails is set to 0 and reported in `warnings`.
// Throws std::invalid_argument when alpha is outside (0, 1) or the result is
// not a valid NullModelResult.
Backbone backbone_extract(const NullModelResult& r, double alpha, bool is_signed,
                          Fwer fwer = Fwer::kNone);

// The summary record of a result after validation.
Summary summarize(const NullModelResult& r);

}  // namespace backbone

#endif  // BACKBONE_EXTRACT_HPP_
