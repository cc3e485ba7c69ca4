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

#ifndef BACKBONE_RESULT_HPP_
#define BACKBONE_RESULT_HPP_

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "backbone/core.hpp"
#include "json.hpp"

namespace backbone {

// Run metadata attached to every null model result.
struct Summary {
  std::string model_name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double row_skew = 0.0;
  double col_skew = 0.0;
  double runtime_seconds = 0.0;
  // Model-specific parameters such as trials, seed or probability method.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

nlohmann::ordered_json to_json(const Summary& s);
Summary summary_from_json(const nlohmann::ordered_json& j);

// Per-edge tail probabilities under a null model.
//   positive(i, j) = P(G*_ij >= G_ij)
//   negative(i, j) = P(G*_ij <= G_ij)
// Diagonal cells are 1 in both matrices.
struct NullModelResult {
  Matrix<double> positive;
  Matrix<double> negative;
  Summary summary;
  std::vector<std::string> row_labels;
};

// Fills the shape and skew fields of a summary from the input graph.
Summary make_summary(const BipartiteGraph& b, std::string model_name);

// Throws std::invalid_argument unless both matrices are square, symmetric,
// hold values in [0, 1], and match the label count.
void validate(const NullModelResult& r);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace backbone

#endif  // BACKBONE_RESULT_HPP_
