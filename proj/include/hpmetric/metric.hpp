#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hpmetric/hitting.hpp"
#include "hpmetric/stationary.hpp"
#include "hpmetric/types.hpp"

namespace hpm {

inline constexpr double kDefaultDegeneracyTolerance = 1e-9;

/// Normalized hitting-probability similarity
///   A(i, j) = phi_i^beta / phi_j^(1 - beta) * Q(i, j),  A(i, i) = 1.
struct HpSimilarity {
  double beta = 0.5;
  Matrix a;
  // max |A - A^T| before the explicit symmetrization
  double asymmetry = 0.0;
};

/// d^beta(i, j) = -ln A(i, j).
struct HpDistance {
  double beta = 0.5;
  Matrix d;
  // beta = 1/2 and some off-diagonal distance vanished
  bool is_pseudo = false;

  std::size_t size() const { return static_cast<std::size_t>(d.rows()); }
};

// Throws DomainError for beta < 1/2 and ConsistencyError when the raw matrix
// is asymmetric by more than 1e-8 (Q and phi from different chains).
HpSimilarity hp_similarity(const HittingProbabilities& q, const StationaryDistribution& phi, double beta);

HpDistance hp_distance(const HpSimilarity& a, double tol_deg = kDefaultDegeneracyTolerance);

struct MetricAxiomOptions {
  double symmetry_tol = 1e-10;
  double triangle_tol = 1e-9;
  // exhaustive up to this size, random triples above
  std::size_t exhaustive_limit = 500;
  std::uint64_t sampled_triples = 1'000'000;
  std::uint64_t seed = 0;
};

struct MetricAxiomReport {
  bool symmetry_ok = true;
  bool triangle_ok = true;
  bool positivity_ok = true;
  bool zero_diagonal_ok = true;
  bool exhaustive = true;
  double worst_asymmetry = 0.0;
  // min over triples of d(i,k) + d(k,j) - d(i,j); negative means a violation
  double worst_triangle_slack = 0.0;
  std::array<std::size_t, 3> worst_triple{0, 0, 0};
  double min_off_diagonal = 0.0;
  std::uint64_t triples_checked = 0;

  bool ok() const { return symmetry_ok && triangle_ok && positivity_ok && zero_diagonal_ok; }
};

MetricAxiomReport verify_metric_axioms(const HpDistance& d, const MetricAxiomOptions& options = {});

/// Partition of the states under i ~ j  <=>  Q(i, j) = Q(j, i) = 1.
struct DegeneracyReport {
  std::vector<std::vector<std::size_t>> classes;  // sorted, ordered by smallest member
  std::vector<std::size_t> class_of;
  bool degenerate = false;

  std::vector<std::vector<std::size_t>> nontrivial_classes() const;
};

// Pairs with min(Q_ij, Q_ji) >= 1 - tol_deg, closed transitively. Throws
// ConsistencyError if the closure joins a pair that misses 1 by more than
// 10 * tol_deg or joins states with different invariant probability.
DegeneracyReport degenerate_pairs(const HittingProbabilities& q, const StationaryDistribution& phi,
                                  double tol_deg = kDefaultDegeneracyTolerance);

}  // namespace hpm
