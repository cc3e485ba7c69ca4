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

#include "backbone/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace backbone {

namespace {

double parse_number(std::string_view text, std::string_view whole) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v))
    throw std::invalid_argument("invalid threshold: " + std::string(whole));
  return v;
}

std::string trim(std::string_view text) {
  std::string out;
  for (char c : text)
    if (c != ' ' && c != '\t') out.push_back(c);
  return out;
}

}  // namespace

ThresholdSpec ThresholdSpec::parse(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty threshold");
  if (s == "mean") return mean();
  if (s.starts_with("mean+") || s.starts_with("mean-")) {
    const bool plus = s[4] == '+';
    std::string_view rest = std::string_view(s).substr(5);
    if (!rest.ends_with("sd"))
      throw std::invalid_argument("unknown threshold statistic: " + s);
    rest.remove_suffix(2);
    if (rest.ends_with("*")) rest.remove_suffix(1);
    const double k = rest.empty() ? 1.0 : parse_number(rest, s);
    if (k < 0.0) throw std::invalid_argument("negative sd multiplier: " + s);
    return plus ? mean_plus_sd(k) : mean_minus_sd(k);
  }
  if (s.starts_with("quantile(") && s.ends_with(")")) {
    const double q = parse_number(std::string_view(s).substr(9, s.size() - 10), s);
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile outside [0, 1]: " + s);
    return quantile(q);
  }
  if (s.size() > 1 && s[0] == 'q') {
    const double q = parse_number(std::string_view(s).substr(1), s);
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile outside [0, 1]: " + s);
    return quantile(q);
  }
  if (std::isalpha(static_cast<unsigned char>(s[0])))
    throw std::invalid_argument("unknown threshold statistic: " + s);
  return constant(parse_number(s, s));
}

std::string to_string(const ThresholdSpec& spec) {
  std::ostringstream out;
  switch (spec.kind) {
    case ThresholdSpec::Kind::kConstant:
      out << spec.value;
      break;
    case ThresholdSpec::Kind::kMean:
      out << "mean";
      break;
    case ThresholdSpec::Kind::kMeanPlusSd:
      out << "mean+" << spec.value << "sd";
      break;
    case ThresholdSpec::Kind::kMeanMinusSd:
      out << "mean-" << spec.value << "sd";
      break;
    case ThresholdSpec::Kind::kQuantile:
      out << "quantile(" << spec.value << ")";
      break;
  }
  return out.str();
}

double resolve(const ThresholdSpec& spec, std::span<const double> weights) {
  if (spec.kind == ThresholdSpec::Kind::kConstant) return spec.value;
  if (weights.empty())
    throw std::invalid_argument("statistic threshold needs at least one edge weight");

  const double n = static_cast<double>(weights.size());
  double mean = 0.0;
  for (double w : weights) mean += w;
  mean /= n;
  double ss = 0.0;
  for (double w : weights) ss += (w - mean) * (w - mean);
  const double sd = weights.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  switch (spec.kind) {
    case ThresholdSpec::Kind::kMean:
      return mean;
    case ThresholdSpec::Kind::kMeanPlusSd:
      return mean + spec.value * sd;
    case ThresholdSpec::Kind::kMeanMinusSd:
      return mean - spec.value * sd;
    case ThresholdSpec::Kind::kQuantile: {
      std::vector<double> sorted(weights.begin(), weights.end());
      std::sort(sorted.begin(), sorted.end());
      const double h = spec.value * (n - 1.0);
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    }
    case ThresholdSpec::Kind::kConstant:
      break;
  }
  return spec.value;
}

std::vector<double> edge_weights(const Projection& g) {
  std::vector<double> out;
  const std::size_t m = g.size();
  out.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      out.push_back(static_cast<double>(g.weight(i, j)));
  return out;
}

Backbone universal(const Projection& g, const ThresholdSpec& upper,
                   const std::optional<ThresholdSpec>& lower) {
  std::vector<double> weights;
  const bool needs_stats = upper.kind != ThresholdSpec::Kind::kConstant ||
                           (lower && lower->kind != ThresholdSpec::Kind::kConstant);
  if (needs_stats) weights = edge_weights(g);

  const double t_upper = resolve(upper, weights);
  std::optional<double> t_lower;
  if (lower) {
    t_lower = resolve(*lower, weights);
    // Zero-variance weights collapse statistic thresholds to T- == T+.
    const bool both_constant = upper.kind == ThresholdSpec::Kind::kConstant &&
                               lower->kind == ThresholdSpec::Kind::kConstant;
    if (*t_lower > t_upper || (both_constant && *t_lower == t_upper))
      throw std::invalid_argument("lower threshold must be below the upper threshold");
  }

  const std::size_t m = g.size();
  Backbone out;
  out.entries = Matrix<std::int8_t>(m, m, 0);
  out.labels = g.labels();
  out.provenance = {"universal", std::nullopt, lower.has_value(), Fwer::kNone};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto w = static_cast<double>(g.weight(i, j));
      std::int8_t v = 0;
      if (w > t_upper)
        v = 1;
      else if (t_lower && w < *t_lower)
        v = -1;
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  }
  return out;
}

}  // namespace backbone
