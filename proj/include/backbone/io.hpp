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

#ifndef BACKBONE_IO_HPP_
#define BACKBONE_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "backbone/core.hpp"
#include "backbone/extract.hpp"
#include "backbone/metrics.hpp"
#include "backbone/result.hpp"

namespace backbone {

// Malformed input. `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// RFC 4180 style records: fields may be double-quoted, quotes inside quoted
// fields are doubled, CRLF line endings are accepted. Blank lines are skipped.
// Each record carries the line it started on.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};
std::vector<CsvRecord> read_csv(std::istream& in, char delimiter = ',');
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields,
                   char delimiter = ',');

// Shortest representation that parses back to the same double.
std::string format_double(double v);
// Throws ParseError on trailing garbage.
double parse_double(std::string_view text, std::size_t line = 0);

// Biadjacency matrix CSV: first row holds column labels (its first cell is
// ignored), first column holds row labels, cells are 0 or 1.
BipartiteGraph read_biadjacency_csv(std::istream& in);
BipartiteGraph read_biadjacency_csv(const std::filesystem::path& path);
void write_biadjacency_csv(const BipartiteGraph& b, const std::filesystem::path& path);

// Two columns (agent, artifact), comma or tab delimited, no header. Labels
// keep first-appearance order. Repeated pairs collapse to one edge and add a
// message to `warnings` when given.
BipartiteGraph read_edgelist(std::istream& in, std::vector<std::string>* warnings = nullptr);
BipartiteGraph read_edgelist(const std::filesystem::path& path,
                             std::vector<std::string>* warnings = nullptr);

enum class BackboneFormat { kMatrixCsv, kSignedEdgelist, kDot };
BackboneFormat parse_backbone_format(std::string_view text);

void write_backbone(const Backbone& b, std::ostream& out, BackboneFormat format);
// Throws std::runtime_error when the path cannot be written.
void write_backbone(const Backbone& b, const std::filesystem::path& path,
                    BackboneFormat format);
// Reads the matrix-csv layout back. The backbone is marked signed when any
// cell is -1 or `is_signed` is set.
Backbone read_backbone_csv(const std::filesystem::path& path, bool is_signed = false);

void write_projection_csv(const Projection& g, const std::filesystem::path& path);

// Labeled square probability matrix.
void write_probability_csv(const Matrix<double>& p, const std::vector<std::string>& labels,
                           const std::filesystem::path& path);
Matrix<double> read_probability_csv(const std::filesystem::path& path,
                                    std::vector<std::string>* labels);

// A null model result persisted as <prefix>.positive.csv,
// <prefix>.negative.csv and the sidecar <prefix>.json holding
// {"summary": ..., "config": ...}.
void save_null_model(const NullModelResult& r, const std::filesystem::path& prefix,
                     const nlohmann::ordered_json& config = nlohmann::ordered_json::object());
NullModelResult load_null_model(const std::filesystem::path& prefix);

std::filesystem::path with_suffix(const std::filesystem::path& base, std::string_view suffix);

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path);

// Two columns (label, community name). Community ids follow first appearance.
Partition read_partition(const std::filesystem::path& path);

// Groups nodes by the party letter of a trailing "(ST-P)" label suffix, with
// independents ("I") grouped with "D". Throws std::invalid_argument for a
// label without the suffix.
Partition party_partition(const std::vector<std::string>& labels);

}  // namespace backbone

#endif  // BACKBONE_IO_HPP_
