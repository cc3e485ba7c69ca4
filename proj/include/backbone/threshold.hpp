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

#ifndef BACKBONE_THRESHOLD_HPP_
#define BACKBONE_THRESHOLD_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "backbone/core.hpp"
#include "backbone/extract.hpp"

namespace backbone {

// A universal threshold, either a constant or a statistic of the projection's
// off-diagonal upper-triangle weights.
struct ThresholdSpec {
  enum class Kind { kConstant, kMean, kMeanPlusSd, kMeanMinusSd, kQuantile };

  Kind kind = Kind::kConstant;
  // Constant value, the sd multiplier k, or the quantile level q.
  double value = 0.0;

  static ThresholdSpec constant(double t) { return {Kind::kConstant, t}; }
  static ThresholdSpec mean() { return {Kind::kMean, 0.0}; }
  static ThresholdSpec mean_plus_sd(double k = 1.0) { return {Kind::kMeanPlusSd, k}; }
  static ThresholdSpec mean_minus_sd(double k = 1.0) { return {Kind::kMeanMinusSd, k}; }
  static ThresholdSpec quantile(double q) { return {Kind::kQuantile, q}; }

  // Parses "2", "-0.5", "mean", "mean+sd", "mean+1.5sd", "mean-2sd",
  // "quantile(0.9)" or "q0.9". Throws std::invalid_argument otherwise.
  static ThresholdSpec parse(std::string_view text);
};

std::string to_string(const ThresholdSpec& spec);

// Resolves a spec against a weight sample. The standard deviation is the
// n-1 normalized sample sd (0 for a single weight) and quantiles interpolate
// linearly between order statistics.
double resolve(const ThresholdSpec& spec, std::span<const double> weights);

// Off-diagonal upper-triangle weights of g, row-major.
std::vector<double> edge_weights(const Projection& g);

// Binary backbone (G_ij > T) when `lower` is empty, signed otherwise
// (+1 if G_ij > T+, -1 if G_ij < T-). Throws std::invalid_argument when the
// resolved thresholds have T- > T+, or T- == T+ with both given as constants.
Backbone universal(const Projection& g, const ThresholdSpec& upper,
                   const std::optional<ThresholdSpec>& lower = std::nullopt);

}  // namespace backbone

#endif  // BACKBONE_THRESHOLD_HPP_
