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

#include "backbone/sdsm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "backbone/parallel.hpp"

namespace backbone {

std::string to_string(ProbabilityMethod method) {
  return method == ProbabilityMethod::kRatio ? "ratio" : "polytope";
}

ProbabilityMethod parse_probability_method(std::string_view text) {
  if (text == "ratio") return ProbabilityMethod::kRatio;
  if (text == "polytope") return ProbabilityMethod::kPolytope;
  throw std::invalid_argument("unknown probability method: " + std::string(text));
}

ConvergenceError::ConvergenceError(std::size_t iterations, double residual)
    : std::runtime_error("polytope fit did not converge after " +
                         std::to_string(iterations) +
                         " iterations (margin residual " + std::to_string(residual) +
                         ")"),
      iterations_(iterations),
      residual_(residual) {}

ProbabilityMatrix probability_matrix_ratio(const BipartiteGraph& b) {
  const Margins mg = margins(b);
  const auto total = static_cast<double>(b.total());
  if (total == 0.0)
    throw std::invalid_argument("ratio probabilities need at least one edge");
  ProbabilityMatrix p;
  p.method = ProbabilityMethod::kRatio;
  p.row_target = mg.row;
  p.col_target = mg.col;
  p.entries = Matrix<double>(b.rows(), b.cols());
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      p.entries(i, j) = std::min(
          1.0, static_cast<double>(mg.row[i]) * static_cast<double>(mg.col[j]) / total);
  return p;
}

namespace {

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double logit(double p) {
  p = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return std::log(p / (1.0 - p));
}

// Dual fit on the active block. `short_target` indexes the shorter axis (p)
// and `long_target` the longer one (q); the fitted cell (s, l) is
// logistic(a[s] + c[l]).
struct DualFit {
  std::vector<double> a;
  std::vector<double> c;
  std::size_t iterations = 0;
  double residual = 0.0;
};

class DualSolver {
 public:
  DualSolver(std::vector<double> short_target, std::vector<double> long_target)
      : r_(std::move(short_target)),
        t_(std::move(long_target)),
        p_(r_.size()),
        q_(t_.size()),
        m_(p_, q_) {}

  DualFit solve(std::vector<double> a, std::vector<double> c, double tol,
                std::size_t max_iter) {
    DualFit fit;
    evaluate(a, c);
    double res = residual();
    std::size_t iter = 0;
    while (res > tol && iter < max_iter) {
      ++iter;
      if (!newton_step(a, c, res)) coordinate_sweep(a, c);
      evaluate(a, c);
      res = residual();
    }
    fit.a = std::move(a);
    fit.c = std::move(c);
    fit.iterations = iter;
    fit.residual = res;
    return fit;
  }

  const Eigen::MatrixXd& cells() const { return m_; }

 private:
  void evaluate(const std::vector<double>& a, const std::vector<double>& c) {
    for (std::size_t s = 0; s < p_; ++s)
      for (std::size_t l = 0; l < q_; ++l) m_(s, l) = logistic(a[s] + c[l]);
    gr_ = m_.rowwise().sum();
    gc_ = m_.colwise().sum().transpose();
    for (std::size_t s = 0; s < p_; ++s) gr_(s) -= r_[s];
    for (std::size_t l = 0; l < q_; ++l) gc_(l) -= t_[l];
  }

  double residual() const {
    return std::max(gr_.cwiseAbs().maxCoeff(), gc_.cwiseAbs().maxCoeff());
  }

  double objective(const std::vector<double>& a, const std::vector<double>& c) const {
    double v = 0.0;
    for (std::size_t s = 0; s < p_; ++s)
      for (std::size_t l = 0; l < q_; ++l) v += softplus(a[s] + c[l]);
    for (std::size_t s = 0; s < p_; ++s) v -= r_[s] * a[s];
    for (std::size_t l = 0; l < q_; ++l) v -= t_[l] * c[l];
    return v;
  }

  // Solves the Newton system using the Schur complement on the short axis:
  //   (D_r - W D_c^-1 W^T) da = -g_r + W D_c^-1 g_c,   dc = D_c^-1 (-g_c - W^T da)
  // The complement is singular along the all-ones vector (the a/c gauge), and
  // the right-hand side is orthogonal to it, so adding a multiple of 1 1^T
  // selects the solution with sum(da) = 0.
  bool newton_step(std::vector<double>& a, std::vector<double>& c, double res) {
    const Eigen::MatrixXd w = m_.array() * (1.0 - m_.array());
    const Eigen::VectorXd dr = w.rowwise().sum();
    const Eigen::VectorXd dc_diag =
        w.colwise().sum().transpose().cwiseMax(1e-300);
    const Eigen::MatrixXd w_scaled = w * dc_diag.cwiseInverse().asDiagonal();
    Eigen::MatrixXd schur = -w_scaled * w.transpose();
    schur.diagonal() += dr;
    const double shift = std::max(dr.mean(), 1e-12);
    schur.array() += shift / static_cast<double>(p_);
    const Eigen::VectorXd rhs = -gr_ + w_scaled * gc_;

    Eigen::VectorXd da;
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() == Eigen::Success) {
      da = llt.solve(rhs);
    } else {
      da = schur.ldlt().solve(rhs);
    }
    const Eigen::VectorXd step_c =
        (-gc_ - w.transpose() * da).cwiseQuotient(dc_diag);
    if (!da.allFinite() || !step_c.allFinite()) return false;

    const double base = objective(a, c);
    const double slope = gr_.dot(da) + gc_.dot(step_c);
    std::vector<double> a_try(p_), c_try(q_);
    double t = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt, t *= 0.5) {
      for (std::size_t s = 0; s < p_; ++s) a_try[s] = a[s] + t * da(s);
      for (std::size_t l = 0; l < q_; ++l) c_try[l] = c[l] + t * step_c(l);
      const double value = objective(a_try, c_try);
      bool accept = value <= base + 1e-4 * t * slope;
      if (!accept && std::abs(value - base) <= 1e-11 * std::max(1.0, std::abs(base))) {
        // Near the optimum the objective stops resolving improvements; fall
        // back to the residual itself.
        evaluate(a_try, c_try);
        accept = residual() < res;
      }
      if (accept) {
        a.swap(a_try);
        c.swap(c_try);
        return true;
      }
    }
    evaluate(a, c);
    return false;
  }

  // One Newton update per coordinate: rows first, then columns.
  void coordinate_sweep(std::vector<double>& a, std::vector<double>& c) {
    for (std::size_t s = 0; s < p_; ++s) {
      double sum = 0.0;
      double curv = 0.0;
      for (std::size_t l = 0; l < q_; ++l) {
        const double v = logistic(a[s] + c[l]);
        sum += v;
        curv += v * (1.0 - v);
      }
      if (curv > 0.0) a[s] -= std::clamp((sum - r_[s]) / curv, -5.0, 5.0);
    }
    for (std::size_t l = 0; l < q_; ++l) {
      double sum = 0.0;
      double curv = 0.0;
      for (std::size_t s = 0; s < p_; ++s) {
        const double v = logistic(a[s] + c[l]);
        sum += v;
        curv += v * (1.0 - v);
      }
      if (curv > 0.0) c[l] -= std::clamp((sum - t_[l]) / curv, -5.0, 5.0);
    }
  }

  std::vector<double> r_;
  std::vector<double> t_;
  std::size_t p_;
  std::size_t q_;
  Eigen::MatrixXd m_;
  Eigen::VectorXd gr_;
  Eigen::VectorXd gc_;
};

void check_margins(const MarginVector& rows, const MarginVector& cols) {
  if (rows.empty() || cols.empty())
    throw std::invalid_argument("margins must be nonempty");
  const auto m = static_cast<std::int64_t>(rows.size());
  const auto n = static_cast<std::int64_t>(cols.size());
  std::int64_t row_total = 0;
  std::int64_t col_total = 0;
  for (auto r : rows) {
    if (r < 0 || r > n) throw std::invalid_argument("row margin out of range");
    row_total += r;
  }
  for (auto c : cols) {
    if (c < 0 || c > m) throw std::invalid_argument("column margin out of range");
    col_total += c;
  }
  if (row_total != col_total)
    throw std::invalid_argument("row and column margins have different totals");
}

}  // namespace

ProbabilityMatrix probability_matrix_polytope(const BipartiteGraph& b,
                                              const PolytopeOptions& options) {
  const Margins mg = margins(b);
  return probability_matrix_polytope(mg.row, mg.col, options);
}

ProbabilityMatrix probability_matrix_polytope(const MarginVector& row_target,
                                              const MarginVector& col_target,
                                              const PolytopeOptions& options) {
  check_margins(row_target, col_target);
  const std::size_t m = row_target.size();
  const std::size_t n = col_target.size();

  // Peel saturated lines. fixed(i, j) is -1 for a free cell.
  Matrix<std::int8_t> fixed(m, n, -1);
  std::vector<std::int64_t> row_left(row_target.begin(), row_target.end());
  std::vector<std::int64_t> col_left(col_target.begin(), col_target.end());
  std::vector<char> row_active(m, 1), col_active(n, 1);
  std::int64_t active_rows = static_cast<std::int64_t>(m);
  std::int64_t active_cols = static_cast<std::int64_t>(n);
  for (bool changed = true; changed && active_rows > 0 && active_cols > 0;) {
    changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (!row_active[i]) continue;
      if (row_left[i] != 0 && row_left[i] != active_cols) continue;
      const bool full = row_left[i] != 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!col_active[j]) continue;
        fixed(i, j) = full ? 1 : 0;
        if (full) --col_left[j];
      }
      row_active[i] = 0;
      --active_rows;
      changed = true;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!col_active[j]) continue;
      if (col_left[j] != 0 && col_left[j] != active_rows) continue;
      const bool full = col_left[j] != 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (!row_active[i]) continue;
        fixed(i, j) = full ? 1 : 0;
        if (full) --row_left[i];
      }
      col_active[j] = 0;
      --active_cols;
      changed = true;
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    if (row_active[i] && (row_left[i] < 0 || row_left[i] > active_cols))
      throw std::invalid_argument("infeasible margins");
  for (std::size_t j = 0; j < n; ++j)
    if (col_active[j] && (col_left[j] < 0 || col_left[j] > active_rows))
      throw std::invalid_argument("infeasible margins");

  ProbabilityMatrix out;
  out.method = ProbabilityMethod::kPolytope;
  out.row_target = row_target;
  out.col_target = col_target;
  out.entries = Matrix<double>(m, n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (fixed(i, j) >= 0) out.entries(i, j) = fixed(i, j);

  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < m; ++i)
    if (row_active[i]) rows.push_back(i);
  for (std::size_t j = 0; j < n; ++j)
    if (col_active[j]) cols.push_back(j);

  if (!rows.empty() && !cols.empty()) {
    const double pr = static_cast<double>(rows.size());
    const double pc = static_cast<double>(cols.size());
    double remaining = 0.0;
    std::vector<double> rt, ct, a0, c0;
    for (std::size_t i : rows) {
      rt.push_back(static_cast<double>(row_left[i]));
      remaining += rt.back();
      a0.push_back(options.initial_row.size() == m ? options.initial_row[i]
                                                   : logit(rt.back() / pc));
    }
    const double offset = logit(remaining / (pr * pc));
    for (std::size_t j : cols) {
      ct.push_back(static_cast<double>(col_left[j]));
      c0.push_back(options.initial_col.size() == n ? options.initial_col[j]
                                                   : logit(ct.back() / pr) - offset);
    }

    const bool rows_short = rows.size() <= cols.size();
    DualSolver solver(rows_short ? rt : ct, rows_short ? ct : rt);
    DualFit fit = rows_short ? solver.solve(a0, c0, options.tol, options.max_iter)
                             : solver.solve(c0, a0, options.tol, options.max_iter);
    out.iterations = fit.iterations;
    const Eigen::MatrixXd& cells = solver.cells();
    for (std::size_t s = 0; s < rows.size(); ++s)
      for (std::size_t l = 0; l < cols.size(); ++l)
        out.entries(rows[s], cols[l]) = rows_short ? cells(s, l) : cells(l, s);
  }

  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += out.entries(i, j);
    res = std::max(res, std::abs(sum - static_cast<double>(row_target[i])));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += out.entries(i, j);
    res = std::max(res, std::abs(sum - static_cast<double>(col_target[j])));
  }
  out.residual = res;
  if (res > options.tol) throw ConvergenceError(out.iterations, res);
  return out;
}

double entropy(const Matrix<double>& m) {
  double h = 0.0;
  for (double v : m.values()) {
    if (v > 0.0) h -= v * std::log(v);
    if (v < 1.0) h -= (1.0 - v) * std::log1p(-v);
  }
  return h;
}

PoissonBinomialParams::PoissonBinomialParams(std::vector<double> probs)
    : probs_(std::move(probs)) {
  for (double p : probs_)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("Poisson binomial parameter outside [0, 1]");
}

PoissonBinomialMoments moments(const PoissonBinomialParams& params) {
  PoissonBinomialMoments mom;
  for (double p : params.probs()) mom.add(p);
  return mom;
}

double rna_cdf(const PoissonBinomialMoments& mom, double x) {
  if (mom.variance <= 0.0) {
    // Every trial is deterministic, so X equals its (integral) mean.
    return x + 0.5 >= mom.mean ? 1.0 : 0.0;
  }
  const double sigma = std::sqrt(mom.variance);
  const double gamma = mom.third / (sigma * sigma * sigma);
  const double z = (x + 0.5 - mom.mean) / sigma;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return std::clamp(cdf + gamma * (1.0 - z * z) * pdf / 6.0, 0.0, 1.0);
}

namespace {

void check_k(const PoissonBinomialParams& params, std::int64_t k) {
  if (k < 0 || k > static_cast<std::int64_t>(params.size()))
    throw std::invalid_argument("k outside [0, n]");
}

}  // namespace

double poisson_binomial_upper_rna(const PoissonBinomialParams& params, std::int64_t k) {
  check_k(params, k);
  if (k == 0) return 1.0;
  return 1.0 - rna_cdf(moments(params), static_cast<double>(k - 1));
}

double poisson_binomial_lower_rna(const PoissonBinomialParams& params, std::int64_t k) {
  check_k(params, k);
  if (k == static_cast<std::int64_t>(params.size())) return 1.0;
  return rna_cdf(moments(params), static_cast<double>(k));
}

std::vector<double> poisson_binomial_pmf(const PoissonBinomialParams& params) {
  const std::size_t n = params.size();
  std::vector<double> pmf(n + 1, 0.0);
  pmf[0] = 1.0;
  std::size_t seen = 0;
  for (double p : params.probs()) {
    ++seen;
    for (std::size_t x = seen; x > 0; --x) pmf[x] = pmf[x] * (1.0 - p) + pmf[x - 1] * p;
    pmf[0] *= 1.0 - p;
  }
  return pmf;
}

namespace {

// P(sum <= k) keeping only states 0..k.
double truncated_lower(std::span<const double> probs, std::int64_t k, bool complement) {
  std::vector<double> state(static_cast<std::size_t>(k) + 1, 0.0);
  state[0] = 1.0;
  for (double p : probs) {
    if (complement) p = 1.0 - p;
    for (std::size_t x = state.size() - 1; x > 0; --x)
      state[x] = state[x] * (1.0 - p) + state[x - 1] * p;
    state[0] *= 1.0 - p;
  }
  return std::min(1.0, std::accumulate(state.begin(), state.end(), 0.0));
}

}  // namespace

double poisson_binomial_exact(const PoissonBinomialParams& params, std::int64_t k,
                              Tail tail) {
  const auto n = static_cast<std::int64_t>(params.size());
  if (tail == Tail::kLower) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    return truncated_lower(params.probs(), k, false);
  }
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  // P(X >= k) = P(n - X <= n - k); pick whichever recurrence is shorter.
  if (n - k < k - 1) return truncated_lower(params.probs(), n - k, true);
  return std::max(0.0, 1.0 - truncated_lower(params.probs(), k - 1, false));
}

NullModelResult sdsm_from_probabilities(const BipartiteGraph& b,
                                        const ProbabilityMatrix& p,
                                        std::size_t threads) {
  const std::size_t m = b.rows();
  const std::size_t n = b.cols();
  if (p.entries.rows() != m || p.entries.cols() != n)
    throw std::invalid_argument("probability matrix shape does not match the graph");
  const Projection g = project(b);

  NullModelResult r;
  r.positive = Matrix<double>(m, m, 1.0);
  r.negative = Matrix<double>(m, m, 1.0);
  r.row_labels = b.row_labels();
  parallel_for(m, threads, [&](std::size_t i, std::size_t) {
    const auto pi = p.entries.row(i);
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto pj = p.entries.row(j);
      PoissonBinomialMoments mom;
      for (std::size_t k = 0; k < n; ++k) mom.add(pi[k] * pj[k]);
      const std::int64_t observed = g.weight(i, j);
      const double at_or_below = rna_cdf(mom, static_cast<double>(observed));
      if (observed == 0) {
        r.positive(i, j) = 1.0;
        r.negative(i, j) = at_or_below;
        continue;
      }
      const double below = rna_cdf(mom, static_cast<double>(observed - 1));
      r.positive(i, j) = 1.0 - below;
      // The skew-corrected CDF is not monotone far in the tails; taking the
      // max keeps positive + negative >= 1.
      r.negative(i, j) =
          observed == static_cast<std::int64_t>(n) ? 1.0 : std::max(at_or_below, below);
    }
  });
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      r.positive(j, i) = r.positive(i, j);
      r.negative(j, i) = r.negative(i, j);
    }
  }
  return r;
}

NullModelResult sdsm(const BipartiteGraph& b, const SdsmOptions& options) {
  Stopwatch clock;
  const ProbabilityMatrix p = options.method == ProbabilityMethod::kRatio
                                  ? probability_matrix_ratio(b)
                                  : probability_matrix_polytope(b, options.polytope);
  NullModelResult r = sdsm_from_probabilities(b, p, options.threads);
  r.summary = make_summary(b, "sdsm");
  r.summary.extra["probability_method"] = to_string(options.method);
  if (options.method == ProbabilityMethod::kPolytope) {
    r.summary.extra["polytope_iterations"] = p.iterations;
    r.summary.extra["polytope_residual"] = p.residual;
  }
  r.summary.runtime_seconds = clock.seconds();
  return r;
}

}  // namespace backbone
