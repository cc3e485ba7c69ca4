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

#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "backbone/core.hpp"
#include "backbone/extract.hpp"
#include "backbone/fdsm.hpp"
#include "backbone/hyperg.hpp"
#include "backbone/io.hpp"
#include "backbone/metrics.hpp"
#include "backbone/parallel.hpp"
#include "backbone/sdsm.hpp"
#include "backbone/threshold.hpp"

namespace backbone::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string format = "matrix";
  std::string output;
  std::string output_format = "matrix-csv";
  std::optional<double> alpha;
  bool is_signed = false;
  std::string fwer = "none";
  std::string method = "polytope";
  std::size_t trials = 1000;
  std::optional<std::uint64_t> seed;
  std::size_t trades = 0;
  bool restart = false;
  std::string dyad;
  std::string dyad_output;
  std::string upper = "0";
  std::string lower;
  bool binary = false;
  std::string partition;
  std::string report_format = "text";
  std::size_t threads = 0;
};

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["input"] = c.input;
  j["format"] = c.format;
  j["output"] = c.output;
  j["output_format"] = c.output_format;
  if (c.command == "universal") {
    j["upper"] = c.upper;
    if (!c.lower.empty()) j["lower"] = c.lower;
  }
  if (c.alpha) {
    j["alpha"] = *c.alpha;
    j["signed"] = c.is_signed;
    j["fwer"] = c.fwer;
  }
  if (c.command == "sdsm" || c.command == "compare") j["method"] = c.method;
  if (c.command == "fdsm" || c.command == "compare") {
    j["trials"] = c.trials;
    j["seed"] = c.seed.value_or(0);
    j["trades"] = c.trades;
    j["restart"] = c.restart;
    if (!c.dyad.empty()) j["dyad"] = c.dyad;
  }
  if (c.command == "compare") j["binary"] = c.binary;
  return j;
}

void check_alpha(const std::optional<double>& alpha) {
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0))
    throw UsageError("--alpha must lie strictly between 0 and 1");
}

BipartiteGraph load_graph(const RunConfig& c, std::ostream& err) {
  std::vector<std::string> warnings;
  BipartiteGraph b = c.format == "edgelist" ? read_edgelist(c.input, &warnings)
                                            : read_biadjacency_csv(c.input);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  err << "read " << b.rows() << " x " << b.cols() << " bipartite graph from " << c.input << '\n';
  return b;
}

void write_run_summary(const RunConfig& c, const Json& summary, const Json& extra = Json::object()) {
  Json j;
  j["summary"] = summary;
  j["config"] = to_json(c);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  write_json(j, with_suffix(c.output, ".json"));
}

void emit_backbone(const RunConfig& c, const Backbone& bb, const Json& summary,
                   std::ostream& err) {
  for (const auto& w : bb.warnings) err << "warning: " << w << '\n';
  write_backbone(bb, c.output, parse_backbone_format(c.output_format));
  Json counts;
  counts["positive_edges"] = bb.positive_edges();
  counts["negative_edges"] = bb.negative_edges();
  write_run_summary(c, summary, Json{{"backbone", counts}});
  err << "wrote backbone (" << bb.positive_edges() << " positive, " << bb.negative_edges()
      << " negative edges) to " << c.output << '\n';
}

// Persists p-values, or extracts inline when --alpha is given.
void finish_null_model(const RunConfig& c, const NullModelResult& r, std::ostream& err) {
  if (c.alpha) {
    const Backbone bb = backbone_extract(r, *c.alpha, c.is_signed, parse_fwer(c.fwer));
    emit_backbone(c, bb, backbone::to_json(r.summary), err);
  } else {
    save_null_model(r, c.output, to_json(c));
    err << "wrote " << c.output << ".positive.csv, .negative.csv and .json\n";
  }
}

std::size_t parse_row_ref(const BipartiteGraph& b, const std::string& ref) {
  try {
    return b.row_index(ref);
  } catch (const std::out_of_range&) {
  }
  // 1-based row number, as accepted by the R interface.
  std::size_t used = 0;
  unsigned long n = 0;
  try {
    n = std::stoul(ref, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == ref.size() && n >= 1 && n <= b.rows()) return n - 1;
  throw UsageError("unknown dyad row: " + ref);
}

FdsmOptions fdsm_options(const RunConfig& c, const BipartiteGraph& b) {
  FdsmOptions opt;
  opt.trials = c.trials;
  opt.seed = c.seed.value_or(0);
  opt.trades_per_sample = c.trades;
  opt.restart = c.restart;
  opt.threads = c.threads;
  if (!c.dyad.empty()) {
    // Labels may themselves contain commas ("Booker, C. (NJ-D)"), so try
    // every split point and keep the one naming two rows.
    std::optional<std::pair<std::size_t, std::size_t>> found;
    for (std::size_t pos = c.dyad.find(','); pos != std::string::npos;
         pos = c.dyad.find(',', pos + 1)) {
      try {
        auto first = parse_row_ref(b, c.dyad.substr(0, pos));
        auto second = parse_row_ref(b, c.dyad.substr(pos + 1));
        found = std::make_pair(first, second);
        break;
      } catch (const UsageError&) {
      }
    }
    if (!found) throw UsageError("--dyad must name two rows as A,B: " + c.dyad);
    opt.dyad = found;
  }
  return opt;
}

int cmd_project(const RunConfig& c, std::ostream& err) {
  const BipartiteGraph b = load_graph(c, err);
  Stopwatch clock;
  const Projection g = project(b);
  write_projection_csv(g, c.output);
  Summary s = make_summary(b, "projection");
  s.runtime_seconds = clock.seconds();
  write_run_summary(c, backbone::to_json(s));
  return kExitOk;
}

int cmd_universal(const RunConfig& c, std::ostream& err) {
  const BipartiteGraph b = load_graph(c, err);
  Stopwatch clock;
  std::optional<ThresholdSpec> lower;
  ThresholdSpec upper;
  try {
    upper = ThresholdSpec::parse(c.upper);
    if (!c.lower.empty()) lower = ThresholdSpec::parse(c.lower);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Projection g = project(b);
  const Backbone bb = universal(g, upper, lower);
  Summary s = make_summary(b, "universal");
  const auto weights = edge_weights(g);
  s.extra["upper"] = to_string(upper);
  s.extra["upper_resolved"] = resolve(upper, weights);
  if (lower) {
    s.extra["lower"] = to_string(*lower);
    s.extra["lower_resolved"] = resolve(*lower, weights);
  }
  s.runtime_seconds = clock.seconds();
  emit_backbone(c, bb, backbone::to_json(s), err);
  return kExitOk;
}

int cmd_hyperg(const RunConfig& c, std::ostream& err) {
  const BipartiteGraph b = load_graph(c, err);
  finish_null_model(c, hyperg(b), err);
  return kExitOk;
}

int cmd_sdsm(const RunConfig& c, std::ostream& err) {
  const BipartiteGraph b = load_graph(c, err);
  SdsmOptions opt;
  opt.method = parse_probability_method(c.method);
  opt.threads = c.threads;
  finish_null_model(c, sdsm(b, opt), err);
  return kExitOk;
}

int cmd_fdsm(const RunConfig& c, std::ostream& err) {
  const BipartiteGraph b = load_graph(c, err);
  const FdsmOptions opt = fdsm_options(c, b);
  const FdsmResult r = fdsm(b, opt);
  finish_null_model(c, r, err);
  if (opt.dyad) {
    const std::string path =
        c.dyad_output.empty() ? with_suffix(c.output, ".dyad.csv").string() : c.dyad_output;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "dyad_value\n";
    for (auto v : r.dyad_values) out << v << '\n';
    err << "wrote " << r.dyad_values.size() << " dyad values to " << path << '\n';
  }
  return kExitOk;
}

int cmd_extract(const RunConfig& c, std::ostream& err) {
  if (!c.alpha) throw UsageError("extract needs --alpha");
  const NullModelResult r = load_null_model(c.input);
  const Backbone bb = backbone_extract(r, *c.alpha, c.is_signed, parse_fwer(c.fwer));
  emit_backbone(c, bb, backbone::to_json(summarize(r)), err);
  return kExitOk;
}

struct CompareRow {
  std::string name;
  double seconds = 0.0;
  Backbone backbone;
};

int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const BipartiteGraph b = load_graph(c, err);
  const double alpha = c.alpha.value_or(0.01);
  const Fwer fwer = parse_fwer(c.fwer);
  const Partition partition =
      c.partition.empty() ? party_partition(b.row_labels()) : read_partition(c.partition);

  std::vector<CompareRow> rows;
  {
    Stopwatch clock;
    const Projection g = project(b);
    Backbone bb = universal(g, ThresholdSpec::constant(0));
    rows.push_back({"Universal (T = 0)", clock.seconds(), std::move(bb)});
  }
  {
    Stopwatch clock;
    const Projection g = project(b);
    Backbone bb = universal(g, ThresholdSpec::mean_plus_sd(), ThresholdSpec::mean_minus_sd());
    rows.push_back({"Universal (T = M + SD)", clock.seconds(), std::move(bb)});
  }
  {
    Stopwatch clock;
    Backbone bb = backbone_extract(hyperg(b), alpha, true, fwer);
    rows.push_back({"Hypergeometric", clock.seconds(), std::move(bb)});
  }
  {
    Stopwatch clock;
    SdsmOptions opt;
    opt.method = parse_probability_method(c.method);
    opt.threads = c.threads;
    Backbone bb = backbone_extract(sdsm(b, opt), alpha, true, fwer);
    rows.push_back({"SDSM", clock.seconds(), std::move(bb)});
  }
  {
    Stopwatch clock;
    RunConfig fc = c;
    fc.dyad.clear();
    Backbone bb = backbone_extract(fdsm(b, fdsm_options(fc, b)), alpha, true, fwer);
    rows.push_back({"FDSM (" + std::to_string(c.trials) + " samples)", clock.seconds(),
                    std::move(bb)});
  }

  const std::size_t k = rows.size();
  std::vector<double> mod(k);
  Matrix<double> corr(k, k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    mod[i] = modularity(rows[i].backbone, partition);
    for (std::size_t j = 0; j < i; ++j) {
      const Correlation r = backbone_correlation(rows[i].backbone, rows[j].backbone, c.binary);
      if (r.degenerate)
        err << "warning: correlation of " << rows[i].name << " and " << rows[j].name
            << " is undefined (constant vector); reported as 0\n";
      corr(i, j) = corr(j, i) = r.r;
    }
  }

  std::ostringstream report;
  if (c.report_format == "json") {
    Json j;
    j["config"] = to_json(c);
    j["seed"] = c.seed.value_or(0);
    for (std::size_t i = 0; i < k; ++i) {
      Json row;
      row["model"] = rows[i].name;
      row["seconds"] = rows[i].seconds;
      row["modularity"] = mod[i];
      row["density"] = density(rows[i].backbone);
      row["positive_edges"] = rows[i].backbone.positive_edges();
      row["negative_edges"] = rows[i].backbone.negative_edges();
      std::vector<double> r;
      for (std::size_t m = 0; m < i; ++m) r.push_back(corr(i, m));
      row["correlation"] = r;
      j["models"].push_back(row);
    }
    report << j.dump(2) << '\n';
  } else if (c.report_format == "csv") {
    std::vector<std::string> header{"model", "seconds", "modularity", "density"};
    for (const auto& r : rows) header.push_back("r_" + r.name);
    write_csv_row(report, header);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::string> fields{rows[i].name, format_double(rows[i].seconds),
                                      format_double(mod[i]),
                                      format_double(density(rows[i].backbone))};
      for (std::size_t m = 0; m < k; ++m) fields.push_back(m < i ? format_double(corr(i, m)) : "");
      write_csv_row(report, fields);
    }
  } else {
    report << std::left << std::setw(26) << "Backbone model" << std::right << std::setw(10)
           << "Time (s)" << std::setw(12) << "Modularity" << "   Pearson correlation\n";
    for (std::size_t i = 0; i < k; ++i) {
      report << std::left << std::setw(26) << rows[i].name << std::right << std::fixed
             << std::setprecision(2) << std::setw(10) << rows[i].seconds << std::setprecision(3)
             << std::setw(12) << mod[i] << "  ";
      for (std::size_t m = 0; m < i; ++m) report << std::setprecision(2) << std::setw(7) << corr(i, m);
      report << std::setw(7) << "---" << '\n';
    }
  }
  if (c.output.empty()) {
    out << report.str();
  } else {
    std::ofstream file(c.output, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + c.output);
    file << report.str();
  }
  return kExitOk;
}

void add_input(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--input,-i", c.input, "Input file")->required();
  cmd->add_option("--format", c.format, "Input format")
      ->check(CLI::IsMember({"matrix", "edgelist"}));
}

void add_output(CLI::App* cmd, RunConfig& c, bool required = true) {
  auto* opt = cmd->add_option("--output,-o", c.output, "Output path (or prefix)");
  if (required) opt->required();
}

void add_extract(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--alpha", c.alpha, "Significance level; extracts the backbone inline");
  cmd->add_flag("--signed", c.is_signed, "Keep negative edges");
  cmd->add_option("--fwer", c.fwer, "Familywise error correction")
      ->check(CLI::IsMember({"none", "bonferroni", "holm"}));
  cmd->add_option("--output-format", c.output_format, "Backbone format")
      ->check(CLI::IsMember({"matrix-csv", "signed-edgelist", "dot"}));
}

void add_fdsm(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--trials", c.trials, "Monte Carlo samples")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Random seed (recorded in the summary)");
  cmd->add_option("--trades", c.trades, "Curveball trades per sample (default 5 x rows)");
  cmd->add_flag("--restart", c.restart, "Restart each sample from the input graph");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Backbone extraction for bipartite projections", "backbone"};
  app.require_subcommand(1);
  app.add_option("--threads", c.threads, "Worker threads (default: $BACKBONE_NUM_THREADS or all cores)");

  auto* project_cmd = app.add_subcommand("project", "Write the weighted projection B B^T");
  add_input(project_cmd, c);
  add_output(project_cmd, c);

  auto* universal_cmd = app.add_subcommand("universal", "Universal threshold backbone");
  add_input(universal_cmd, c);
  add_output(universal_cmd, c);
  universal_cmd->add_option("--upper", c.upper, "Upper threshold: number or mean+1sd style");
  universal_cmd->add_option("--lower", c.lower, "Lower threshold; makes the backbone signed");
  universal_cmd->add_option("--output-format", c.output_format, "Backbone format")
      ->check(CLI::IsMember({"matrix-csv", "signed-edgelist", "dot"}));

  auto* hyperg_cmd = app.add_subcommand("hyperg", "Hypergeometric model");
  add_input(hyperg_cmd, c);
  add_output(hyperg_cmd, c);
  add_extract(hyperg_cmd, c);

  auto* sdsm_cmd = app.add_subcommand("sdsm", "Stochastic degree sequence model");
  add_input(sdsm_cmd, c);
  add_output(sdsm_cmd, c);
  add_extract(sdsm_cmd, c);
  sdsm_cmd->add_option("--method", c.method, "Cell probabilities")
      ->check(CLI::IsMember({"ratio", "polytope"}));

  auto* fdsm_cmd = app.add_subcommand("fdsm", "Fixed degree sequence model");
  add_input(fdsm_cmd, c);
  add_output(fdsm_cmd, c);
  add_extract(fdsm_cmd, c);
  add_fdsm(fdsm_cmd, c);
  fdsm_cmd->add_option("--dyad", c.dyad, "Record G*_ij for the rows A,B (labels or 1-based numbers)");
  fdsm_cmd->add_option("--dyad-output", c.dyad_output, "CSV for dyad values (default <output>.dyad.csv)");

  auto* extract_cmd = app.add_subcommand("extract", "Extract a backbone from saved p-values");
  extract_cmd->add_option("--input,-i", c.input, "Prefix written by hyperg/sdsm/fdsm")->required();
  add_output(extract_cmd, c);
  add_extract(extract_cmd, c);

  auto* compare_cmd = app.add_subcommand("compare", "Compare all backbone models");
  add_input(compare_cmd, c);
  add_output(compare_cmd, c, false);
  compare_cmd->add_option("--alpha", c.alpha, "Significance level (default 0.01)");
  compare_cmd->add_option("--fwer", c.fwer, "Familywise error correction")
      ->check(CLI::IsMember({"none", "bonferroni", "holm"}));
  compare_cmd->add_option("--method", c.method, "SDSM cell probabilities")
      ->check(CLI::IsMember({"ratio", "polytope"}));
  add_fdsm(compare_cmd, c);
  compare_cmd->add_option("--partition", c.partition,
                          "label,community CSV (default: party suffix of the labels)");
  compare_cmd->add_flag("--binary", c.binary, "Correlate 0/1 vectors instead of signed ones");
  compare_cmd->add_option("--report-format", c.report_format, "Report format")
      ->check(CLI::IsMember({"text", "csv", "json"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n' << "run 'backbone --help' for usage\n";
    return kExitUsage;
  }

  try {
    check_alpha(c.alpha);
    if (c.threads > 0) setenv(kThreadsEnvVar, std::to_string(c.threads).c_str(), 1);
    CLI::App* chosen = app.get_subcommands().front();
    c.command = chosen->get_name();
    if ((c.command == "fdsm" || c.command == "compare") && !c.seed) {
      c.seed = std::random_device{}();
      err << "using seed " << *c.seed << '\n';
    }
    if (c.command == "project") return cmd_project(c, err);
    if (c.command == "universal") return cmd_universal(c, err);
    if (c.command == "hyperg") return cmd_hyperg(c, err);
    if (c.command == "sdsm") return cmd_sdsm(c, err);
    if (c.command == "fdsm") return cmd_fdsm(c, err);
    if (c.command == "extract") return cmd_extract(c, err);
    if (c.command == "compare") return cmd_compare(c, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace backbone::cli
