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

// Acceptance checks. One PASS / FAIL / SKIP line per criterion; the exit
// status is nonzero when any criterion fails.
//
// The Senate checks need the 114th Senate biadjacency matrix. They look for
// $BACKBONE_S114, then tests/data/S114.csv, and are skipped if neither exists.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "backbone/core.hpp"
#include "backbone/extract.hpp"
#include "backbone/fdsm.hpp"
#include "backbone/hyperg.hpp"
#include "backbone/io.hpp"
#include "backbone/metrics.hpp"
#include "backbone/sdsm.hpp"
#include "backbone/threshold.hpp"
#include "cli.hpp"
#include "support.hpp"

namespace bt = backbone::testing;
using namespace backbone;

namespace {

class Report {
 public:
  void pass(const std::string& id, const std::string& detail) { emit("PASS", id, detail, pass_); }
  void fail(const std::string& id, const std::string& detail) { emit("FAIL", id, detail, fail_); }
  void skip(const std::string& id, const std::string& detail) { emit("SKIP", id, detail, skip_); }
  void check(bool ok, const std::string& id, const std::string& detail) {
    ok ? pass(id, detail) : fail(id, detail);
  }
  int exit_code() const {
    std::printf("\n%d passed, %d failed, %d skipped\n", pass_, fail_, skip_);
    return fail_ == 0 ? 0 : 1;
  }

 private:
  void emit(const char* tag, const std::string& id, const std::string& detail, int& counter) {
    ++counter;
    std::printf("%s  %-34s %s\n", tag, id.c_str(), detail.c_str());
    std::fflush(stdout);
  }
  int pass_ = 0, fail_ = 0, skip_ = 0;
};

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- oracles

void hm_enumeration(Report& rep) {
  std::mt19937_64 rng(20260101);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t m = 2 + rng() % 2, n = 1 + rng() % 6;
    const auto b = BipartiteGraph::from_rows(bt::random_rows(rng, m, n, 0.5));
    const auto g = project(b);
    const auto r = hyperg(b);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        const auto e = bt::enumerate_hypergeometric(static_cast<int>(n), static_cast<int>(g.weight(i, i)),
                                                    static_cast<int>(g.weight(j, j)),
                                                    static_cast<int>(g.weight(i, j)));
        worst = std::max({worst, std::abs(r.positive(i, j) - e.upper), std::abs(r.negative(i, j) - e.lower)});
      }
  }
  rep.check(worst <= 1e-10, "oracle.hm_enumeration",
            fmt("20 graphs m<=3 n<=6, max |err| = %.3g (tol 1e-10)", worst));
}

void rna_vs_dp(Report& rep) {
  std::mt19937_64 rng(20260102);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int v = 0; v < 200; ++v) {
    const std::size_t n = 50 + static_cast<std::size_t>(std::llround(4950.0 * v / 199.0));
    std::vector<double> p(n);
    // Plain uniforms, and products of two uniforms as in p_k = P_ik P_jk.
    for (auto& x : p) x = v % 2 ? u(rng) : u(rng) * u(rng);
    const auto pmf = bt::convolution_pmf(p);
    const PoissonBinomialParams params(p);
    long double below = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      const long double upper = 1.0L - below;
      below += pmf[k];
      const auto kk = static_cast<std::int64_t>(k);
      worst = std::max(worst, std::abs(poisson_binomial_upper_rna(params, kk) - static_cast<double>(upper)));
      worst = std::max(worst, std::abs(poisson_binomial_lower_rna(params, kk) - static_cast<double>(below)));
    }
  }
  rep.check(worst <= 0.01, "oracle.rna_vs_exact",
            fmt("200 vectors, n in [50, 5000], max |err| = %.4g (tol 0.01)", worst));
}

void polytope(Report& rep) {
  std::mt19937_64 rng(20260103);
  double worst_res = 0.0;
  double worst_gain = -1.0;  // largest H(M') - H(M_max) seen
  int cycles = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t m = 3 + rng() % 20, n = 3 + rng() % 40;
    const auto b = BipartiteGraph::from_rows(bt::random_rows(rng, m, n, 0.1 + 0.6 * (rng() % 100) / 100.0));
    const auto mg = margins(b);
    const auto p = probability_matrix_polytope(b);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += p.entries(i, j);
      worst_res = std::max(worst_res, std::abs(s - static_cast<double>(mg.row[i])));
    }
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < m; ++i) s += p.entries(i, j);
      worst_res = std::max(worst_res, std::abs(s - static_cast<double>(mg.col[j])));
    }
    const double h = entropy(p.entries);
    int done = 0;
    for (int tries = 0; done < 100 && tries < 100000; ++tries) {
      const std::size_t i = rng() % m, k = rng() % m, j = rng() % n, l = rng() % n;
      if (i == k || j == l) continue;
      const double eps = 1e-4 * (1 + rng() % 10);
      const double s = rng() % 2 ? eps : -eps;
      Matrix<double> q = p.entries;
      q(i, j) += s;
      q(k, l) += s;
      q(i, l) -= s;
      q(k, j) -= s;
      bool inside = true;
      for (auto v : {q(i, j), q(k, l), q(i, l), q(k, j)}) inside = inside && v >= 0.0 && v <= 1.0;
      if (!inside) continue;
      worst_gain = std::max(worst_gain, entropy(q) - h);
      ++done;
      ++cycles;
    }
  }
  rep.check(worst_res <= 1e-6, "oracle.polytope_margins",
            fmt("20 instances, max margin residual = %.3g (tol 1e-6)", worst_res));
  rep.check(cycles == 2000 && worst_gain <= 0.0, "oracle.polytope_cycle_entropy",
            fmt("%.0f cycles, max entropy change = %.3g (must be <= 0)", cycles, worst_gain));

  const auto two = probability_matrix_polytope(BipartiteGraph::from_rows({{1, 0}, {0, 1}}));
  double dev = 0;
  for (double v : two.entries.values()) dev = std::max(dev, std::abs(v - 0.5));
  rep.check(dev <= 1e-8, "oracle.polytope_2x2", fmt("max |M - 0.5| = %.3g (tol 1e-8)", dev));
}

void curveball_uniformity(Report& rep) {
  const std::vector<bt::Rows> instances = {
      {{1, 0}, {0, 1}},
      {{1, 1, 0}, {1, 0, 0}, {0, 0, 1}},
      {{1, 1, 0, 0}, {0, 0, 1, 1}},
      {{1, 1, 0, 0}, {0, 1, 1, 0}, {0, 0, 1, 1}},
      {{1, 1, 1, 0}, {1, 0, 0, 1}, {0, 1, 0, 1}},
  };
  const int samples = 100000;
  for (std::size_t t = 0; t < instances.size(); ++t) {
    const auto b = BipartiteGraph::from_rows(instances[t]);
    const auto mg = margins(b);
    const auto all = bt::enumerate_fixed_margins(std::vector<int>(mg.row.begin(), mg.row.end()),
                                                 std::vector<int>(mg.col.begin(), mg.col.end()));
    std::map<std::vector<unsigned>, std::size_t> index;
    for (std::size_t k = 0; k < all.size(); ++k) index[all[k]] = k;
    std::vector<double> counts(all.size(), 0.0);
    bool margins_ok = true;
    Rng rng(derive_seed(20260104, t));
    SamplerState s(b.bits(), t);
    for (int k = 0; k < samples; ++k) {
      curveball_trades(s, 5 * b.rows(), rng);
      const auto masks = bt::row_masks(s.matrix);
      const auto it = index.find(masks);
      // Every sampled matrix must be one of the enumerated fixed-margin ones.
      if (it == index.end()) {
        margins_ok = false;
        continue;
      }
      counts[it->second] += 1;
    }
    const double expected = static_cast<double>(samples) / static_cast<double>(all.size());
    double chi = 0;
    for (double c : counts) chi += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(all.size() - 1));
    const double pval = boost::math::cdf(boost::math::complement(dist, chi));
    rep.check(margins_ok && pval > 0.001, "oracle.curveball_uniform[" + std::to_string(t) + "]",
              fmt("%.0f matrices, chi2 = %.2f, p = %.4f (need p > 0.001, margins exact)",
                  static_cast<double>(all.size()), chi, pval));
  }
}

void fdsm_vs_enumeration(Report& rep) {
  const auto b = BipartiteGraph::from_rows({{1, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 1, 0}});
  const auto mg = margins(b);
  const auto all = bt::enumerate_fixed_margins(std::vector<int>(mg.row.begin(), mg.row.end()),
                                               std::vector<int>(mg.col.begin(), mg.col.end()));
  const auto g = project(b);
  FdsmOptions opt;
  opt.trials = 20000;
  opt.seed = 20260105;
  const auto r = fdsm(b, opt);
  double worst = 0.0;  // in units of standard errors
  bool ok = true;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      double up = 0, lo = 0;
      for (const auto& mat : all) {
        const int o = bt::popcount(mat[i] & mat[j]);
        up += o >= g.weight(i, j);
        lo += o <= g.weight(i, j);
      }
      up /= static_cast<double>(all.size());
      lo /= static_cast<double>(all.size());
      for (auto [est, exact] : {std::pair{r.positive(i, j), up}, std::pair{r.negative(i, j), lo}}) {
        const double se = std::sqrt(exact * (1 - exact) / opt.trials);
        const double diff = std::abs(est - exact);
        if (se == 0.0) {
          ok = ok && diff == 0.0;
        } else {
          worst = std::max(worst, diff / se);
          ok = ok && diff <= 3 * se;
        }
      }
    }
  rep.check(ok, "oracle.fdsm_vs_enumeration",
            fmt("3x4, %.0f fixed-margin matrices, N = 20000, max deviation = %.2f SE (tol 3)",
                static_cast<double>(all.size()), worst));
}

NullModelResult hand_result(double p01, double p02, double p12) {
  NullModelResult r;
  r.positive = Matrix<double>(3, 3, 1.0);
  r.negative = Matrix<double>(3, 3, 1.0);
  r.positive(0, 1) = r.positive(1, 0) = p01;
  r.positive(0, 2) = r.positive(2, 0) = p02;
  r.positive(1, 2) = r.positive(2, 1) = p12;
  r.row_labels = {"a", "b", "c"};
  r.summary.model_name = "hand";
  return r;
}

std::set<std::pair<std::size_t, std::size_t>> edges(const Backbone& b, int sign) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (b.at(i, j) == sign) out.emplace(i, j);
  return out;
}

bool subset(const std::set<std::pair<std::size_t, std::size_t>>& a,
            const std::set<std::pair<std::size_t, std::size_t>>& b) {
  for (const auto& e : a)
    if (!b.count(e)) return false;
  return true;
}

void extraction(Report& rep) {
  const auto r = hand_result(0.001, 0.002, 0.02);
  const auto holm = backbone_extract(r, 0.1, false, Fwer::kHolm);
  const auto bonf = backbone_extract(r, 0.1, false, Fwer::kBonferroni);
  const auto stop = backbone_extract(hand_result(0.001, 0.04, 0.045), 0.1, false, Fwer::kHolm);
  const bool hand = holm.positive_edges() == 3 && bonf.positive_edges() == 2 && bonf.at(1, 2) == 0 &&
                    stop.positive_edges() == 1 && stop.at(0, 1) == 1;
  rep.check(hand, "oracle.fwer_hand_examples",
            "holm {0.001,0.002,0.02} at 0.1 keeps 3; bonferroni keeps 2; holm stops at first failure");

  std::mt19937_64 rng(20260106);
  bool nested = true, monotone = true;
  for (int t = 0; t < 50; ++t) {
    const auto res = bt::random_result(rng, 3 + rng() % 25);
    for (double alpha : {0.01, 0.05, 0.1}) {
      const auto n = backbone_extract(res, alpha, true, Fwer::kNone);
      const auto b = backbone_extract(res, alpha, true, Fwer::kBonferroni);
      const auto h = backbone_extract(res, alpha, true, Fwer::kHolm);
      for (int sign : {1, -1})
        nested = nested && subset(edges(b, sign), edges(h, sign)) && subset(edges(h, sign), edges(n, sign));
    }
    for (auto f : {Fwer::kNone, Fwer::kBonferroni}) {
      const auto lo = backbone_extract(res, 0.01, false, f);
      const auto hi = backbone_extract(res, 0.05, false, f);
      monotone = monotone && subset(edges(lo, 1), edges(hi, 1));
    }
  }
  rep.check(nested, "oracle.fwer_nesting", "bonferroni <= holm <= none on 50 random results, both tails");
  rep.check(monotone, "oracle.alpha_monotone", "edges(alpha 0.01) <= edges(alpha 0.05), none and bonferroni");
}

void determinism(Report& rep) {
  bt::TempDir dir;
  std::mt19937_64 rng(20260107);
  auto rows = bt::random_rows(rng, 30, 120, 0.15);
  const auto b = BipartiteGraph::from_rows(rows);
  const auto input = dir.file("in.csv");
  write_biadjacency_csv(b, input);
  std::vector<std::string> outputs;
  bool ran = true;
  for (const char* threads : {"1", "4", "8"}) {
    const auto prefix = dir.file(std::string("t") + threads);
    std::ostringstream out, err;
    const int code = cli::run({"--threads", threads, "fdsm", "-i", input, "-o", prefix, "--trials", "1000", "--seed",
                               "19", "--dyad", "1,2"},
                              out, err);
    ran = ran && code == 0;
    outputs.push_back(slurp(prefix + ".positive.csv") + slurp(prefix + ".negative.csv") +
                      slurp(prefix + ".dyad.csv"));
  }
  const bool same = ran && outputs[0] == outputs[1] && outputs[0] == outputs[2] && !outputs[0].empty();
  rep.check(same, "oracle.fdsm_thread_determinism",
            "fdsm --trials 1000 --seed 19 byte-identical outputs at 1, 4 and 8 threads");
}

// ---------------------------------------------------------------- Senate

std::optional<std::string> find_senate() {
  if (const char* env = std::getenv("BACKBONE_S114"); env && std::filesystem::exists(env)) return env;
  for (const char* p : {"tests/data/S114.csv", "../tests/data/S114.csv", "../../tests/data/S114.csv"})
    if (std::filesystem::exists(p)) return p;
  return std::nullopt;
}

void senate(Report& rep) {
  const char* ids[] = {"senate.projection_values", "senate.universal_t0",   "senate.hm_modularity",
                       "senate.sdsm_modularity",   "senate.fdsm_modularity", "senate.correlations",
                       "senate.fdsm_dyad",         "senate.runtime"};
  const auto path = find_senate();
  if (!path) {
    for (const char* id : ids) rep.skip(id, "S114.csv not found (set BACKBONE_S114)");
    return;
  }
  const auto b = read_biadjacency_csv(std::filesystem::path(*path));
  const auto g = project(b);
  const std::string alexander = "Alexander, L. (TN-R)", boxer = "Boxer, B. (CA-D)",
                    cantwell = "Cantwell, M. (WA-D)", booker = "Booker, C. (NJ-D)",
                    warren = "Warren, E. (MA-D)", cruz = "Cruz, T. (TX-R)", sanders = "Sanders, B. (VT-I)";
  try {
    const auto a = g.weight(alexander, alexander), ab = g.weight(alexander, boxer),
               ac = g.weight(alexander, cantwell), bw = g.weight(booker, warren), cs = g.weight(cruz, sanders);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zux%zu; Alexander %lld, A-Boxer %lld, A-Cantwell %lld, Booker-Warren %lld, Cruz-Sanders %lld",
                  b.rows(), b.cols(), static_cast<long long>(a), static_cast<long long>(ab),
                  static_cast<long long>(ac), static_cast<long long>(bw), static_cast<long long>(cs));
    rep.check(b.rows() == 100 && b.cols() == 3589 && a == 141 && ab == 10 && ac == 15 && bw == 98 && cs == 5,
              ids[0], buf);
  } catch (const std::exception& e) {
    rep.fail(ids[0], std::string("missing label: ") + e.what());
  }

  const Partition party = party_partition(b.row_labels());
  const auto u0 = universal(g, ThresholdSpec::constant(0));
  const double d0 = density(u0), q0 = modularity(u0, party);
  rep.check(u0.positive_edges() == 4949 && std::abs(q0 - (-0.005)) <= 0.01, ids[1],
            fmt("density %.6f (need 4949/4950), modularity %.4f (need -0.005 +- 0.01)", d0, q0));

  Stopwatch hm_clock;
  const auto hm = backbone_extract(hyperg(b), 0.01, true);
  const double hm_time = hm_clock.seconds();
  const double q_hm = modularity(hm, party);
  rep.check(std::abs(q_hm - 0.215) <= 0.01, ids[2], fmt("modularity %.4f (need 0.215 +- 0.01)", q_hm));

  Stopwatch sdsm_clock;
  const auto sd = backbone_extract(sdsm(b), 0.01, true);
  const double sdsm_time = sdsm_clock.seconds();
  const double q_sd = modularity(sd, party);
  rep.check(std::abs(q_sd - 0.471) <= 0.02, ids[3], fmt("modularity %.4f (need 0.471 +- 0.02)", q_sd));

  bool fdsm_ok = true;
  std::string detail = "modularity by seed:";
  double fdsm_time = 0.0;
  std::optional<Backbone> fd_first;
  std::optional<FdsmResult> first_result;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    FdsmOptions opt;
    opt.trials = 1000;
    opt.seed = seed;
    opt.dyad = resolve_dyad(b, booker, warren);
    Stopwatch clock;
    auto res = fdsm(b, opt);
    auto bb = backbone_extract(res, 0.01, true);
    if (seed == 1) fdsm_time = clock.seconds();
    const double q = modularity(bb, party);
    fdsm_ok = fdsm_ok && std::abs(q - 0.468) <= 0.02;
    detail += fmt(" %.4f", q);
    if (seed == 1) {
      fd_first = std::move(bb);
      first_result = std::move(res);
    }
  }
  rep.check(fdsm_ok, ids[4], detail + " (need 0.468 +- 0.02 each)");

  const double r_sf = backbone_correlation(sd, *fd_first).r;
  const double r_hs = backbone_correlation(hm, sd).r;
  const double r_hf = backbone_correlation(hm, *fd_first).r;
  rep.check(r_sf >= 0.93 && r_hs >= 0.65 && r_hs <= 0.80 && r_hf >= 0.65 && r_hf <= 0.80, ids[5],
            fmt("SDSM-FDSM %.3f (>= 0.93), HM-SDSM %.3f, HM-FDSM %.3f (in [0.65, 0.80])", r_sf, r_hs, r_hf));

  const auto [bi, wi] = resolve_dyad(b, booker, warren);
  const double p_bw = first_result->positive(bi, wi);
  rep.check(p_bw < 0.005, ids[6], fmt("P(G* >= 98) = %.4g (need < alpha/2 = 0.005)", p_bw));

  rep.check(hm_time <= 5 && sdsm_time <= 120 && fdsm_time <= 240, ids[7],
            fmt("HM %.2fs (<= 5), SDSM %.2fs (<= 120), FDSM(1000) %.2fs (<= 240)", hm_time, sdsm_time, fdsm_time));
}

}  // namespace

int main() {
  Report rep;
  std::printf("backbone acceptance\n\n");
  senate(rep);
  hm_enumeration(rep);
  rna_vs_dp(rep);
  polytope(rep);
  curveball_uniformity(rep);
  fdsm_vs_enumeration(rep);
  extraction(rep);
  determinism(rep);
  return rep.exit_code();
}
