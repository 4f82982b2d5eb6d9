#include "hpmetric/hitting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "hpmetric/errors.hpp"
#include "hpmetric/parallel.hpp"
#include "hpmetric/rng.hpp"

namespace hpm {

namespace {

constexpr double kSingularRcond = 1e-15;
constexpr double kCapacitanceTolerance = 1e-12;

void check_state(const TransitionMatrix& p, std::size_t s, const char* what) {
  if (s >= p.size()) {
    throw DomainError(std::string(what) + " state " + std::to_string(s) + " out of range for " +
                      std::to_string(p.size()) + " states");
  }
}

// Ratios can exceed 1 by a few ulps when the exact value is 1.
double clamp_probability(double q) { return q > 1.0 ? 1.0 : q; }

// Cumulative row distributions over the support of P, for walk sampling.
class TransitionSampler {
 public:
  explicit TransitionSampler(const TransitionMatrix& p) : rows_(p.size()) {
    const auto& m = p.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      auto& row = rows_[static_cast<std::size_t>(i)];
      double acc = 0.0;
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) > 0.0) {
          acc += m(i, j);
          row.cumulative.push_back(acc);
          row.targets.push_back(static_cast<std::size_t>(j));
        }
      }
    }
  }

  std::size_t step(std::size_t from, PhiloxStream& rng) const {
    const auto& row = rows_[from];
    const double u = rng.uniform() * row.cumulative.back();
    const auto it = std::upper_bound(row.cumulative.begin(), row.cumulative.end(), u);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - row.cumulative.begin()),
                                         row.targets.size() - 1);
    return row.targets[k];
  }

 private:
  struct Row {
    std::vector<double> cumulative;
    std::vector<std::size_t> targets;
  };
  std::vector<Row> rows_;
};

WalkRecord run_excursion(const TransitionSampler& sampler, std::size_t start, std::size_t target,
                         bool stop_at_target, PhiloxStream& rng) {
  WalkRecord record;
  record.start = start;
  std::size_t state = start;
  for (std::uint64_t steps = 0; steps < kMaxWalkSteps; ++steps) {
    state = sampler.step(state, rng);
    if (state == start) return record;
    if (state == target) {
      record.hit_before_return = true;
      ++record.visits_to_target;
      if (stop_at_target) return record;
    }
  }
  throw SimulationError("walk from state " + std::to_string(start) + " exceeded " +
                        std::to_string(kMaxWalkSteps) + " steps");
}

struct ExcursionTotals {
  std::uint64_t hits = 0;
  std::uint64_t visits = 0;
  unsigned __int128 visits_squared = 0;
};

ExcursionTotals run_excursions(const TransitionMatrix& p, std::size_t i, std::size_t j, std::uint64_t walks,
                               std::uint64_t seed, unsigned threads, bool stop_at_target) {
  check_state(p, i, "source");
  check_state(p, j, "target");
  if (i == j) throw DomainError("simulation needs distinct source and target states");
  if (walks == 0) throw DomainError("walk count must be at least 1");

  const TransitionSampler sampler(p);
  // Fixed chunking keeps integer partial sums identical for any thread count.
  constexpr std::uint64_t kChunk = 4096;
  const std::size_t chunks = static_cast<std::size_t>((walks + kChunk - 1) / kChunk);
  std::vector<ExcursionTotals> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(walks, begin + kChunk);
    auto& totals = partial[c];
    for (std::uint64_t w = begin; w < end; ++w) {
      PhiloxStream rng(seed, w);
      const auto record = run_excursion(sampler, i, j, stop_at_target, rng);
      totals.hits += record.hit_before_return ? 1 : 0;
      totals.visits += record.visits_to_target;
      totals.visits_squared += static_cast<unsigned __int128>(record.visits_to_target) * record.visits_to_target;
    }
  });
  ExcursionTotals sum;
  for (const auto& t : partial) {
    sum.hits += t.hits;
    sum.visits += t.visits;
    sum.visits_squared += t.visits_squared;
  }
  return sum;
}

}  // namespace

Matrix hitting_system(const TransitionMatrix& p, std::size_t target) {
  check_state(p, target, "target");
  const auto n = static_cast<Eigen::Index>(p.size());
  const auto j = static_cast<Eigen::Index>(target);
  Matrix m = Matrix::Identity(n, n) - p.matrix();
  m.row(j) += p.matrix().row(j);
  return m;
}

Vector hitting_reference(const TransitionMatrix& p, std::size_t target) {
  const Matrix m = hitting_system(p, target);
  const Eigen::PartialPivLU<Matrix> lu(m);
  if (!(lu.rcond() > kSingularRcond)) {
    throw NumericalError("M(" + p.labels()[target] + ") is numerically singular");
  }
  const Matrix inv = lu.inverse();
  const auto n = m.rows();
  const auto j = static_cast<Eigen::Index>(target);
  Vector column(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    column(i) = i == j ? 0.0 : clamp_probability(inv(i, j) / inv(i, i));
  }
  return column;
}

HittingProbabilities hitting_reference_all(const TransitionMatrix& p, unsigned threads) {
  const auto n = static_cast<Eigen::Index>(p.size());
  HittingProbabilities out;
  out.q.resize(n, n);
  parallel_for(p.size(), threads, [&](std::size_t j) { out.q.col(static_cast<Eigen::Index>(j)) = hitting_reference(p, j); });
  return out;
}

HittingProbabilities hitting_fast(const TransitionMatrix& p, const HittingOptions& options) {
  const auto n = static_cast<Eigen::Index>(p.size());
  HittingProbabilities out;
  out.q = Matrix::Zero(n, n);
  if (n == 1) return out;

  const Eigen::PartialPivLU<Matrix> lu(hitting_system(p, 0));
  if (!(lu.rcond() * options.max_condition >= 1.0)) {
    out = hitting_reference_all(p, options.threads);
    out.full_fallback = true;
    return out;
  }
  const Matrix inv = lu.inverse();
  const auto& pm = p.matrix();

  // Row 0 of P M(1)^{-1}; rows j != 0 follow from e_j^T P M(1)^{-1} = e_j^T M(1)^{-1} - e_j^T.
  const Eigen::RowVectorXd first_row = pm.row(0) * inv;

  for (Eigen::Index i = 1; i < n; ++i) out.q(i, 0) = clamp_probability(inv(i, 0) / inv(i, i));

  std::atomic<std::size_t> fallbacks{0};
  parallel_for(static_cast<std::size_t>(n - 1), options.threads, [&](std::size_t c) {
    const Eigen::Index j = static_cast<Eigen::Index>(c) + 1;
    // M(j) = M(1) + U V^T, U = [e_j, -e_1], V^T = [e_j^T P; e_1^T P].
    // Capacitance I + V^T M(1)^{-1} U:
    const double c00 = inv(j, j);  // 1 + (M(1)^{-1}_jj - 1)
    const double c01 = -inv(j, 0);
    const double c10 = first_row(j);
    const double c11 = 1.0 - first_row(0);
    const double det = c00 * c11 - c01 * c10;
    const double scale = std::max({std::abs(c00 * c11), std::abs(c01 * c10), 1.0});
    if (!(std::abs(det) > kCapacitanceTolerance * scale)) {
      out.q.col(j) = hitting_reference(p, static_cast<std::size_t>(j));
      fallbacks.fetch_add(1, std::memory_order_relaxed);
      return;
    }
    const double k00 = c11 / det, k01 = -c01 / det, k10 = -c10 / det, k11 = c00 / det;

    // (V^T M(1)^{-1}) column j: [M(1)^{-1}_jj - 1, first_row_j]
    const double vj0 = inv(j, j) - 1.0;
    const double vj1 = first_row(j);
    const double gj0 = k00 * vj0 + k01 * vj1;
    const double gj1 = k10 * vj0 + k11 * vj1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      // left factor (M(1)^{-1} U) row i: [M(1)^{-1}_ij, -M(1)^{-1}_i1]
      const double bij = inv(i, j);
      const double bi0 = -inv(i, 0);
      const double mij = bij - (bij * gj0 + bi0 * gj1);
      // (V^T M(1)^{-1}) column i: [M(1)^{-1}_ji, first_row_i]
      const double vi0 = inv(j, i);
      const double vi1 = first_row(i);
      const double gi0 = k00 * vi0 + k01 * vi1;
      const double gi1 = k10 * vi0 + k11 * vi1;
      const double mii = inv(i, i) - (bij * gi0 + bi0 * gi1);
      out.q(i, j) = clamp_probability(mij / mii);
    }
  });
  out.fallback_columns = fallbacks.load();
  return out;
}

MonteCarloEstimate simulate_hit_before_return(const TransitionMatrix& p, std::size_t i, std::size_t j,
                                              std::uint64_t walks, std::uint64_t seed, unsigned threads) {
  const auto totals = run_excursions(p, i, j, walks, seed, threads, true);
  MonteCarloEstimate est;
  est.walks = walks;
  est.mean = static_cast<double>(totals.hits) / static_cast<double>(walks);
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(walks));
  return est;
}

MonteCarloEstimate simulate_visit_counts(const TransitionMatrix& p, std::size_t i, std::size_t j,
                                         std::uint64_t walks, std::uint64_t seed, unsigned threads) {
  const auto totals = run_excursions(p, i, j, walks, seed, threads, false);
  const double w = static_cast<double>(walks);
  MonteCarloEstimate est;
  est.walks = walks;
  est.mean = static_cast<double>(totals.visits) / w;
  if (walks > 1) {
    const double second = static_cast<double>(totals.visits_squared) / w;
    const double variance = std::max(0.0, (second - est.mean * est.mean) * w / (w - 1.0));
    est.std_error = std::sqrt(variance / w);
  }
  return est;
}

}  // namespace hpm
