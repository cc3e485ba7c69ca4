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

#include "backbone/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace backbone {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<CsvRecord> read_csv(std::istream& in, char delimiter) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool any = false;  // the current record has content
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(field_quoted ? field : std::string(trim(field)));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    if (any) {
      end_field();
      records.push_back(std::move(current));
    }
    current = CsvRecord{};
    field.clear();
    field_quoted = false;
    any = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = true;
      field_quoted = true;
      any = true;
    } else if (ch == delimiter) {
      any = true;
      end_field();
    } else if (ch == '\r') {
      // Dropped; "\r\n" ends the record at '\n'.
    } else if (ch == '\n') {
      end_record();
      ++line;
      current.line = line;
    } else {
      if (!any) current.line = line;
      any = true;
      field.push_back(ch);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", line);
  end_record();
  return records;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out << delimiter;
    const std::string& f = fields[k];
    const bool quote = f.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                           std::string::npos ||
                       (!f.empty() && (f.front() == ' ' || f.back() == ' '));
    if (!quote) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, std::size_t line) {
  text = trim(text);
  double v = 0.0;
  const char* begin = text.data();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("not a number: '" + std::string(text) + "'", line);
  return v;
}

BipartiteGraph read_biadjacency_csv(std::istream& in) {
  const auto records = read_csv(in);
  if (records.empty()) throw ParseError("empty biadjacency file", 0);
  const auto& header = records.front().fields;
  if (header.size() < 2) throw ParseError("header needs at least one column label", records.front().line);
  std::vector<std::string> col_labels(header.begin() + 1, header.end());
  const std::size_t n = col_labels.size();
  const std::size_t m = records.size() - 1;
  if (m == 0) throw ParseError("biadjacency file has no data rows", records.front().line);

  BitMatrix bits(m, n);
  std::vector<std::string> row_labels;
  row_labels.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const CsvRecord& rec = records[i + 1];
    if (rec.fields.size() != n + 1)
      throw ParseError("row '" + (rec.fields.empty() ? std::string() : rec.fields[0]) +
                           "' has " + std::to_string(rec.fields.size()) + " fields, expected " +
                           std::to_string(n + 1),
                       rec.line);
    row_labels.push_back(rec.fields[0]);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& cell = rec.fields[j + 1];
      if (cell == "1") {
        bits.set(i, j, true);
      } else if (cell != "0") {
        throw ParseError("non-binary cell '" + cell + "' at row '" + rec.fields[0] +
                             "', column '" + col_labels[j] + "' (field " +
                             std::to_string(j + 2) + ")",
                         rec.line);
      }
    }
  }
  try {
    return BipartiteGraph(std::move(bits), std::move(row_labels), std::move(col_labels));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

BipartiteGraph read_biadjacency_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_biadjacency_csv(in);
}

void write_biadjacency_csv(const BipartiteGraph& b, const std::filesystem::path& path) {
  auto out = open_output(path);
  std::vector<std::string> row{""};
  row.insert(row.end(), b.col_labels().begin(), b.col_labels().end());
  write_csv_row(out, row);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    row.assign(1, b.row_labels()[i]);
    for (std::size_t j = 0; j < b.cols(); ++j) row.push_back(b.at(i, j) ? "1" : "0");
    write_csv_row(out, row);
  }
  finish_output(out, path);
}

BipartiteGraph read_edgelist(std::istream& in, std::vector<std::string>* warnings) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const std::size_t first_nl = text.find('\n');
  const char delimiter =
      text.substr(0, first_nl).find('\t') != std::string::npos ? '\t' : ',';
  std::istringstream body(text);
  const auto records = read_csv(body, delimiter);
  if (records.empty()) throw ParseError("empty edgelist", 0);

  std::vector<std::string> rows, cols;
  std::unordered_map<std::string, std::size_t> row_index, col_index;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t duplicates = 0;
  for (const CsvRecord& rec : records) {
    if (rec.fields.size() != 2)
      throw ParseError("expected 2 columns, found " + std::to_string(rec.fields.size()), rec.line);
    auto intern = [](const std::string& label, std::vector<std::string>& labels,
                     std::unordered_map<std::string, std::size_t>& index) {
      auto [it, inserted] = index.emplace(label, labels.size());
      if (inserted) labels.push_back(label);
      return it->second;
    };
    const std::size_t i = intern(rec.fields[0], rows, row_index);
    const std::size_t j = intern(rec.fields[1], cols, col_index);
    if (seen.emplace(i, j).second)
      edges.emplace_back(i, j);
    else
      ++duplicates;
  }
  if (duplicates > 0 && warnings)
    warnings->push_back(std::to_string(duplicates) + " duplicate edge(s) collapsed");

  BitMatrix bits(rows.size(), cols.size());
  for (auto [i, j] : edges) bits.set(i, j, true);
  return BipartiteGraph(std::move(bits), std::move(rows), std::move(cols));
}

BipartiteGraph read_edgelist(const std::filesystem::path& path,
                             std::vector<std::string>* warnings) {
  auto in = open_input(path);
  return read_edgelist(in, warnings);
}

BackboneFormat parse_backbone_format(std::string_view text) {
  if (text == "matrix-csv" || text == "matrix") return BackboneFormat::kMatrixCsv;
  if (text == "signed-edgelist" || text == "edgelist") return BackboneFormat::kSignedEdgelist;
  if (text == "dot") return BackboneFormat::kDot;
  throw std::invalid_argument("unknown backbone format: " + std::string(text));
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_backbone(const Backbone& b, std::ostream& out, BackboneFormat format) {
  const std::size_t m = b.size();
  switch (format) {
    case BackboneFormat::kMatrixCsv: {
      std::vector<std::string> row{""};
      row.insert(row.end(), b.labels.begin(), b.labels.end());
      write_csv_row(out, row);
      for (std::size_t i = 0; i < m; ++i) {
        row.assign(1, b.labels[i]);
        for (std::size_t j = 0; j < m; ++j) row.push_back(std::to_string(b.at(i, j)));
        write_csv_row(out, row);
      }
      break;
    }
    case BackboneFormat::kSignedEdgelist:
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
          if (b.at(i, j) != 0)
            write_csv_row(out, {b.labels[i], b.labels[j], std::to_string(b.at(i, j))});
      break;
    case BackboneFormat::kDot:
      out << "graph backbone {\n";
      for (std::size_t i = 0; i < m; ++i) out << "  " << dot_quote(b.labels[i]) << ";\n";
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          const int v = b.at(i, j);
          if (v == 0) continue;
          out << "  " << dot_quote(b.labels[i]) << " -- " << dot_quote(b.labels[j])
              << " [sign=" << v;
          if (v < 0) out << ", style=dashed, color=red";
          out << "];\n";
        }
      }
      out << "}\n";
      break;
  }
}

void write_backbone(const Backbone& b, const std::filesystem::path& path,
                    BackboneFormat format) {
  auto out = open_output(path);
  write_backbone(b, out, format);
  finish_output(out, path);
}

namespace {

// Square labeled matrix whose header repeats the row labels.
template <typename T, typename Parse>
Matrix<T> read_square_csv(const std::filesystem::path& path, std::vector<std::string>* labels,
                          Parse parse) {
  auto in = open_input(path);
  const auto records = read_csv(in);
  if (records.empty()) throw ParseError("empty matrix file " + path.string(), 0);
  const std::size_t m = records.front().fields.size() - 1;
  if (records.size() != m + 1)
    throw ParseError("matrix in " + path.string() + " is not square", 0);
  Matrix<T> out(m, m);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < m; ++i) {
    const CsvRecord& rec = records[i + 1];
    if (rec.fields.size() != m + 1) throw ParseError("ragged matrix row", rec.line);
    if (rec.fields[0] != records.front().fields[i + 1])
      throw ParseError("row label '" + rec.fields[0] + "' does not match the header", rec.line);
    names.push_back(rec.fields[0]);
    for (std::size_t j = 0; j < m; ++j) out(i, j) = parse(rec.fields[j + 1], rec.line);
  }
  if (labels) *labels = std::move(names);
  return out;
}

}  // namespace

Backbone read_backbone_csv(const std::filesystem::path& path, bool is_signed) {
  Backbone b;
  b.entries = read_square_csv<std::int8_t>(
      path, &b.labels, [](const std::string& cell, std::size_t line) -> std::int8_t {
        if (cell == "1") return 1;
        if (cell == "0") return 0;
        if (cell == "-1") return -1;
        throw ParseError("backbone cell must be -1, 0 or 1, found '" + cell + "'", line);
      });
  b.provenance.is_signed = is_signed || b.negative_edges() > 0;
  validate(b);
  return b;
}

void write_projection_csv(const Projection& g, const std::filesystem::path& path) {
  auto out = open_output(path);
  std::vector<std::string> row{""};
  row.insert(row.end(), g.labels().begin(), g.labels().end());
  write_csv_row(out, row);
  for (std::size_t i = 0; i < g.size(); ++i) {
    row.assign(1, g.labels()[i]);
    for (std::size_t j = 0; j < g.size(); ++j) row.push_back(std::to_string(g.weight(i, j)));
    write_csv_row(out, row);
  }
  finish_output(out, path);
}

void write_probability_csv(const Matrix<double>& p, const std::vector<std::string>& labels,
                           const std::filesystem::path& path) {
  auto out = open_output(path);
  std::vector<std::string> row{""};
  row.insert(row.end(), labels.begin(), labels.end());
  write_csv_row(out, row);
  for (std::size_t i = 0; i < p.rows(); ++i) {
    row.assign(1, labels[i]);
    for (std::size_t j = 0; j < p.cols(); ++j) row.push_back(format_double(p(i, j)));
    write_csv_row(out, row);
  }
  finish_output(out, path);
}

Matrix<double> read_probability_csv(const std::filesystem::path& path,
                                    std::vector<std::string>* labels) {
  return read_square_csv<double>(path, labels, [](const std::string& cell, std::size_t line) {
    return parse_double(cell, line);
  });
}

std::filesystem::path with_suffix(const std::filesystem::path& base, std::string_view suffix) {
  std::filesystem::path out = base;
  out += std::string(suffix);
  return out;
}

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  finish_output(out, path);
}

void save_null_model(const NullModelResult& r, const std::filesystem::path& prefix,
                     const nlohmann::ordered_json& config) {
  write_probability_csv(r.positive, r.row_labels, with_suffix(prefix, ".positive.csv"));
  write_probability_csv(r.negative, r.row_labels, with_suffix(prefix, ".negative.csv"));
  nlohmann::ordered_json sidecar;
  sidecar["summary"] = to_json(r.summary);
  sidecar["config"] = config;
  write_json(sidecar, with_suffix(prefix, ".json"));
}

NullModelResult load_null_model(const std::filesystem::path& prefix) {
  NullModelResult r;
  std::vector<std::string> negative_labels;
  r.positive = read_probability_csv(with_suffix(prefix, ".positive.csv"), &r.row_labels);
  r.negative = read_probability_csv(with_suffix(prefix, ".negative.csv"), &negative_labels);
  if (negative_labels != r.row_labels)
    throw ParseError("positive and negative matrices have different labels", 0);
  auto in = open_input(with_suffix(prefix, ".json"));
  try {
    const auto j = nlohmann::ordered_json::parse(in);
    r.summary = summary_from_json(j.contains("summary") ? j.at("summary") : j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad summary sidecar: ") + e.what(), 0);
  }
  validate(r);
  return r;
}

Partition read_partition(const std::filesystem::path& path) {
  auto in = open_input(path);
  Partition p;
  std::map<std::string, int> ids;
  for (const CsvRecord& rec : read_csv(in)) {
    if (rec.fields.size() != 2) throw ParseError("partition rows need 2 columns", rec.line);
    auto [it, inserted] = ids.emplace(rec.fields[1], static_cast<int>(ids.size()));
    if (!p.assignment.emplace(rec.fields[0], it->second).second)
      throw ParseError("node '" + rec.fields[0] + "' assigned twice", rec.line);
  }
  return p;
}

Partition party_partition(const std::vector<std::string>& labels) {
  Partition p;
  for (const std::string& label : labels) {
    const std::size_t close = label.rfind(')');
    const std::size_t dash = label.rfind('-', close);
    if (close == std::string::npos || dash == std::string::npos || close != dash + 2)
      throw std::invalid_argument("label has no (ST-P) party suffix: " + label);
    char party = label[dash + 1];
    if (party == 'I') party = 'D';
    p.assignment[label] = party;
  }
  return p;
}

}  // namespace backbone
