#pragma once

#include <cstddef>
#include <cstdint>

#include "hpmetric/graph.hpp"
#include "hpmetric/types.hpp"

namespace hpm {

/// Q(i, j) = P_i[tau_j < tau_i], the probability that a walk from i reaches j
/// before returning to i. The diagonal is stored as 0.
struct HittingProbabilities {
  Matrix q;
  // columns that fell back to a direct solve because the 2x2 capacitance was singular
  std::size_t fallback_columns = 0;
  // true when M(1) was too ill-conditioned and every column used a direct solve
  bool full_fallback = false;

  std::size_t size() const { return static_cast<std::size_t>(q.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

struct HittingOptions {
  unsigned threads = 0;
  // reciprocal condition estimate of M(1) below 1/max_condition forces the reference path
  double max_condition = 1e12;
};

// M(j) = I - P + e_j e_j^T P.
Matrix hitting_system(const TransitionMatrix& p, std::size_t target);

// Column Q(., target) from an independent LU factorization of M(target).
Vector hitting_reference(const TransitionMatrix& p, std::size_t target);

// All columns of Q, each from its own factorization: O(n^4), for cross-checks.
HittingProbabilities hitting_reference_all(const TransitionMatrix& p, unsigned threads = 0);

// O(n^3): one inverse of M(1), then every other column through a rank-2
// Woodbury correction that reads O(n) entries of M(1)^{-1}.
HittingProbabilities hitting_fast(const TransitionMatrix& p, const HittingOptions& options = {});

/// One excursion from `start`, stopped at the first return to start (or at the
/// first arrival at the target when only the hit event is needed).
struct WalkRecord {
  std::size_t start = 0;
  bool hit_before_return = false;
  std::uint64_t visits_to_target = 0;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t walks = 0;
};

inline constexpr std::uint64_t kMaxWalkSteps = 10'000'000;

// Fraction of `walks` excursions from i that reach j before returning to i,
// with binomial standard error sqrt(q(1-q)/walks).
MonteCarloEstimate simulate_hit_before_return(const TransitionMatrix& p, std::size_t i, std::size_t j,
                                              std::uint64_t walks, std::uint64_t seed, unsigned threads = 0);

// Mean number of visits to j during an excursion from i (expected phi_j / phi_i).
MonteCarloEstimate simulate_visit_counts(const TransitionMatrix& p, std::size_t i, std::size_t j,
                                         std::uint64_t walks, std::uint64_t seed, unsigned threads = 0);

}  // namespace hpm
