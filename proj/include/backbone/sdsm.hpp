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

#ifndef BACKBONE_SDSM_HPP_
#define BACKBONE_SDSM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "backbone/core.hpp"
#include "backbone/hyperg.hpp"
#include "backbone/result.hpp"

namespace backbone {

enum class ProbabilityMethod { kRatio, kPolytope };

std::string to_string(ProbabilityMethod method);
ProbabilityMethod parse_probability_method(std::string_view text);

// Cellwise probabilities P(B*_ij = 1).
struct ProbabilityMatrix {
  Matrix<double> entries;
  ProbabilityMethod method = ProbabilityMethod::kPolytope;
  MarginVector row_target;
  MarginVector col_target;
  // Polytope fit diagnostics: Newton iterations and the final max absolute
  // margin residual. Zero for the ratio method.
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct PolytopeOptions {
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  // Optional starting dual parameters, one per row / column of the input.
  // Entries for saturated rows and columns are ignored.
  std::vector<double> initial_row;
  std::vector<double> initial_col;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::size_t iterations, double residual);
  std::size_t iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

// min(1, R_i * C_j / sum(B)). Throws std::invalid_argument for an all-zero B.
ProbabilityMatrix probability_matrix_ratio(const BipartiteGraph& b);

// Maximum-entropy matrix with the margins of B and entries in [0, 1].
//
// Rows and columns whose margin is 0 or full are fixed first (repeatedly, as
// fixing one line can saturate another). The remaining cells take the
// stationarity form 1 / (1 + exp(-(a_i + c_j))) and the duals (a, c) are
// fit by damped Newton on the convex dual, using a Schur complement on the
// shorter axis, with coordinate-wise Newton sweeps when a line search stalls.
//
// Throws ConvergenceError if the margin residual is above tol after max_iter.
ProbabilityMatrix probability_matrix_polytope(const BipartiteGraph& b,
                                              const PolytopeOptions& options = {});
ProbabilityMatrix probability_matrix_polytope(const MarginVector& row_target,
                                              const MarginVector& col_target,
                                              const PolytopeOptions& options = {});

// sum over cells of -M ln M - (1 - M) ln(1 - M), with 0 ln 0 = 0.
double entropy(const Matrix<double>& m);

// Success probabilities of independent Bernoulli trials.
class PoissonBinomialParams {
 public:
  // Throws std::invalid_argument for a value outside [0, 1].
  explicit PoissonBinomialParams(std::vector<double> probs);
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

// Sufficient statistics of the refined normal approximation.
struct PoissonBinomialMoments {
  double mean = 0.0;      // sum p
  double variance = 0.0;  // sum p (1 - p)
  double third = 0.0;     // sum p (1 - p) (1 - 2p)
  std::size_t trials = 0;

  void add(double p) {
    const double q = p * (1.0 - p);
    mean += p;
    variance += q;
    third += q * (1.0 - 2.0 * p);
    ++trials;
  }
};

PoissonBinomialMoments moments(const PoissonBinomialParams& params);

// Refined normal approximation of P(X <= x):
//   clamp01( Phi(z) + gamma (1 - z^2) phi(z) / 6 ),  z = (x + 0.5 - mu) / sigma
// with gamma = third / sigma^3. A zero variance is an exact point mass.
double rna_cdf(const PoissonBinomialMoments& mom, double x);

// P(X >= k) = 1 - F(k - 1) under the refined normal approximation.
// Throws std::invalid_argument for k outside [0, n].
double poisson_binomial_upper_rna(const PoissonBinomialParams& params, std::int64_t k);
// P(X <= k) = F(k). Throws std::invalid_argument for k outside [0, n].
double poisson_binomial_lower_rna(const PoissonBinomialParams& params, std::int64_t k);

// Exact P(X = x) for x = 0..n by the convolution recurrence.
std::vector<double> poisson_binomial_pmf(const PoissonBinomialParams& params);

// Exact tail by the truncated O(n k) recurrence. k outside [0, n] gives the
// trivial probability (0 or 1).
double poisson_binomial_exact(const PoissonBinomialParams& params, std::int64_t k,
                              Tail tail);

struct SdsmOptions {
  ProbabilityMethod method = ProbabilityMethod::kPolytope;
  PolytopeOptions polytope;
  std::size_t threads = 0;  // 0: default_thread_count()
};

// Stochastic degree sequence model. G*_ij is Poisson binomial with
// parameters P_ik * P_jk; both tails use the refined normal approximation.
NullModelResult sdsm(const BipartiteGraph& b, const SdsmOptions& options = {});

// Tail probabilities for a fixed probability matrix; exposed so tests can
// compare against the exact recurrence on the same P.
NullModelResult sdsm_from_probabilities(const BipartiteGraph& b,
                                        const ProbabilityMatrix& p,
                                        std::size_t threads = 0);

}  // namespace backbone

#endif  // BACKBONE_SDSM_HPP_
