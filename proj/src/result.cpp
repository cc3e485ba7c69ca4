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

#include "backbone/result.hpp"

#include <stdexcept>

namespace backbone {

nlohmann::ordered_json to_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["model_name"] = s.model_name;
  j["rows"] = s.rows;
  j["cols"] = s.cols;
  j["row_skew"] = s.row_skew;
  j["col_skew"] = s.col_skew;
  j["runtime_seconds"] = s.runtime_seconds;
  j["extra"] = s.extra;
  return j;
}

Summary summary_from_json(const nlohmann::ordered_json& j) {
  Summary s;
  s.model_name = j.at("model_name").get<std::string>();
  s.rows = j.at("rows").get<std::size_t>();
  s.cols = j.at("cols").get<std::size_t>();
  s.row_skew = j.at("row_skew").get<double>();
  s.col_skew = j.at("col_skew").get<double>();
  s.runtime_seconds = j.at("runtime_seconds").get<double>();
  if (j.contains("extra")) s.extra = j.at("extra");
  return s;
}

Summary make_summary(const BipartiteGraph& b, std::string model_name) {
  const Margins mg = margins(b);
  Summary s;
  s.model_name = std::move(model_name);
  s.rows = b.rows();
  s.cols = b.cols();
  s.row_skew = skewness(std::span<const std::int64_t>(mg.row));
  s.col_skew = skewness(std::span<const std::int64_t>(mg.col));
  return s;
}

void validate(const NullModelResult& r) {
  const std::size_t m = r.row_labels.size();
  for (const Matrix<double>* mat : {&r.positive, &r.negative}) {
    if (mat->rows() != m || mat->cols() != m)
      throw std::invalid_argument("probability matrix shape does not match labels");
    if (!mat->is_symmetric())
      throw std::invalid_argument("probability matrix is not symmetric");
    for (double v : mat->values())
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("probability outside [0, 1]");
  }
}

}  // namespace backbone
