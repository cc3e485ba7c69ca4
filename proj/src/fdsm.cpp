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

#include "backbone/fdsm.hpp"

#include <bit>
#include <stdexcept>

#include "backbone/parallel.hpp"

namespace backbone {

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index bound must be positive");
  // Values below `threshold` would bias the modulo.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(splitmix64(master) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

void curveball_trade(SamplerState& state, std::size_t row_a, std::size_t row_b,
                     Rng& rng) {
  if (row_a == row_b) throw std::invalid_argument("curveball trade needs two distinct rows");
  BitMatrix& mat = state.matrix;
  auto a = mat.row_words(row_a);
  auto b = mat.row_words(row_b);
  const std::size_t words = mat.words_per_row();

  // Columns owned by exactly one row, in increasing order; the first
  // `only_a` entries start out in row a.
  std::vector<std::uint32_t> pool;
  std::size_t only_a = 0;
  for (std::size_t w = 0; w < words; ++w) {
    BitMatrix::Word bits = a[w] & ~b[w];
    only_a += static_cast<std::size_t>(std::popcount(bits));
  }
  ++state.trades_performed;
  if (only_a == 0) return;
  std::size_t only_b = 0;
  for (std::size_t w = 0; w < words; ++w)
    only_b += static_cast<std::size_t>(std::popcount(b[w] & ~a[w]));
  if (only_b == 0) return;

  pool.reserve(only_a + only_b);
  for (std::size_t w = 0; w < words; ++w) {
    BitMatrix::Word bits = a[w] ^ b[w];
    while (bits) {
      const int bit = std::countr_zero(bits);
      pool.push_back(static_cast<std::uint32_t>(w * BitMatrix::kWordBits + bit));
      bits &= bits - 1;
    }
    // Clear the traded columns from both rows; they are reassigned below.
    const BitMatrix::Word shared = a[w] & b[w];
    a[w] = shared;
    b[w] = shared;
  }

  // Partial Fisher-Yates: the first only_a slots become row a's columns.
  const std::size_t total = pool.size();
  for (std::size_t t = 0; t < only_a; ++t) {
    const std::size_t pick = t + static_cast<std::size_t>(uniform_index(rng, total - t));
    std::swap(pool[t], pool[pick]);
  }
  for (std::size_t t = 0; t < total; ++t) {
    const std::uint32_t col = pool[t];
    const BitMatrix::Word mask = BitMatrix::Word{1} << (col % BitMatrix::kWordBits);
    (t < only_a ? a : b)[col / BitMatrix::kWordBits] |= mask;
  }
}

void curveball_trades(SamplerState& state, std::size_t trades, Rng& rng) {
  const std::size_t m = state.matrix.rows();
  if (m < 2) throw std::invalid_argument("curveball sampling needs at least two rows");
  for (std::size_t t = 0; t < trades; ++t) {
    const auto a = static_cast<std::size_t>(uniform_index(rng, m));
    auto b = static_cast<std::size_t>(uniform_index(rng, m - 1));
    if (b >= a) ++b;
    curveball_trade(state, a, b, rng);
  }
}

BipartiteGraph curveball_sample(const BipartiteGraph& b, std::size_t trades, Rng& rng) {
  if (b.rows() < 2) throw std::invalid_argument("curveball sampling needs at least two rows");
  if (trades == 0) throw std::invalid_argument("curveball sampling needs at least one trade");
  SamplerState state(b.bits(), 0);
  curveball_trades(state, trades, rng);
  return BipartiteGraph(std::move(state.matrix), b.row_labels(), b.col_labels());
}

std::pair<std::size_t, std::size_t> resolve_dyad(const BipartiteGraph& b,
                                                 const std::string& a,
                                                 const std::string& c) {
  return {b.row_index(a), b.row_index(c)};
}

namespace {

struct Counts {
  std::vector<std::uint32_t> at_or_above;
  std::vector<std::uint32_t> at_or_below;
};

class Accumulator {
 public:
  Accumulator(const Matrix<std::int64_t>& observed, std::size_t workers,
              const std::optional<std::pair<std::size_t, std::size_t>>& dyad,
              std::vector<std::int64_t>* dyad_values)
      : observed_(observed),
        m_(observed.rows()),
        counts_(workers, Counts{std::vector<std::uint32_t>(m_ * m_, 0),
                                std::vector<std::uint32_t>(m_ * m_, 0)}),
        dyad_(dyad),
        dyad_values_(dyad_values) {}

  void add(const BitMatrix& sample, std::size_t trial, std::size_t worker) {
    Counts& c = counts_[worker];
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = i + 1; j < m_; ++j) {
        const auto w = static_cast<std::int64_t>(sample.overlap(i, j));
        const std::int64_t g = observed_(i, j);
        c.at_or_above[i * m_ + j] += w >= g;
        c.at_or_below[i * m_ + j] += w <= g;
      }
    }
    if (dyad_)
      (*dyad_values_)[trial] =
          static_cast<std::int64_t>(sample.overlap(dyad_->first, dyad_->second));
  }

  void finish(std::size_t trials, NullModelResult& r) const {
    const double n = static_cast<double>(trials);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = i + 1; j < m_; ++j) {
        std::uint64_t above = 0;
        std::uint64_t below = 0;
        for (const Counts& c : counts_) {
          above += c.at_or_above[i * m_ + j];
          below += c.at_or_below[i * m_ + j];
        }
        r.positive(i, j) = r.positive(j, i) = static_cast<double>(above) / n;
        r.negative(i, j) = r.negative(j, i) = static_cast<double>(below) / n;
      }
    }
  }

 private:
  const Matrix<std::int64_t>& observed_;
  std::size_t m_;
  std::vector<Counts> counts_;
  std::optional<std::pair<std::size_t, std::size_t>> dyad_;
  std::vector<std::int64_t>* dyad_values_;
};

// Samples held in memory at once in chain mode.
constexpr std::size_t kChainBatch = 64;

}  // namespace

FdsmResult fdsm(const BipartiteGraph& b, const FdsmOptions& options) {
  Stopwatch clock;
  const std::size_t m = b.rows();
  if (options.trials == 0) throw std::invalid_argument("fdsm needs at least one trial");
  if (m < 2) throw std::invalid_argument("fdsm needs at least two rows");
  if (options.dyad &&
      (options.dyad->first >= m || options.dyad->second >= m ||
       options.dyad->first == options.dyad->second))
    throw std::invalid_argument("dyad must name two distinct rows");

  const std::size_t trades = options.trades_per_sample == 0 ? 5 * m : options.trades_per_sample;
  const std::size_t threads = resolve_threads(options.threads);
  const Matrix<std::int64_t> observed = co_occurrence(b.bits());

  FdsmResult r;
  r.positive = Matrix<double>(m, m, 1.0);
  r.negative = Matrix<double>(m, m, 1.0);
  r.row_labels = b.row_labels();
  r.trials = options.trials;
  r.dyad = options.dyad;
  if (options.dyad) r.dyad_values.assign(options.trials, 0);

  Accumulator acc(observed, threads, options.dyad, &r.dyad_values);
  if (options.restart) {
    parallel_for(options.trials, threads, [&](std::size_t t, std::size_t worker) {
      SamplerState state(b.bits(), derive_seed(options.seed, t));
      Rng rng(state.rng_seed);
      curveball_trades(state, trades, rng);
      acc.add(state.matrix, t, worker);
    });
  } else {
    SamplerState chain(b.bits(), options.seed);
    std::vector<BitMatrix> batch;
    for (std::size_t start = 0; start < options.trials; start += kChainBatch) {
      const std::size_t end = std::min(options.trials, start + kChainBatch);
      batch.clear();
      for (std::size_t t = start; t < end; ++t) {
        Rng rng(derive_seed(options.seed, t));
        curveball_trades(chain, trades, rng);
        batch.push_back(chain.matrix);
      }
      parallel_for(batch.size(), threads, [&](std::size_t k, std::size_t worker) {
        acc.add(batch[k], start + k, worker);
      });
    }
  }
  acc.finish(options.trials, r);

  r.summary = make_summary(b, "fdsm");
  r.summary.extra["trials"] = options.trials;
  r.summary.extra["seed"] = options.seed;
  r.summary.extra["trades_per_sample"] = trades;
  r.summary.extra["mode"] = options.restart ? "restart" : "chain";
  if (options.dyad) {
    r.summary.extra["dyad"] = {b.row_labels()[options.dyad->first],
                               b.row_labels()[options.dyad->second]};
  }
  r.summary.runtime_seconds = clock.seconds();
  return r;
}

}  // namespace backbone
