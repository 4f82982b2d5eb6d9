#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpmetric/graph.hpp"
#include "hpmetric/metric.hpp"
#include "hpmetric/stationary.hpp"

namespace hpm {

/// Members of a degenerate class in the order every commute visits them,
/// starting from the smallest index.
struct OrderedClass {
  std::vector<std::size_t> members;
};

/// segment[v] = k when v lies between members[k-1] and members[k] (indices mod
/// K), i.e. members[k] is the first class member any walk from v can reach.
/// Empty for class members themselves.
struct SegmentLabeling {
  std::size_t class_id = 0;
  std::vector<std::optional<std::size_t>> segment;
};

// Reachability through states outside `members`, by BFS on the support of P.
// Throws StructureError if the successors are not unique or the cycle does not close.
OrderedClass order_class(const TransitionMatrix& p, std::span<const std::size_t> members);

SegmentLabeling segments(const TransitionMatrix& p, const OrderedClass& cls, std::size_t class_id = 0);

// Absolute segment id per node: nodes share an id iff they carry the same
// label with respect to every labeling. A class member gets its own label
// with respect to its own class.
std::vector<std::size_t> absolute_segments(std::size_t n, const std::vector<SegmentLabeling>& labelings);

/// Chain on the blocks of a partition:
///   P'(U, V) = sum_{i in U} phi_i P(i, V) / phi_U,  phi'_U = sum_{i in U} phi_i.
struct QuotientChain {
  TransitionMatrix p;
  std::vector<std::vector<std::size_t>> classes;  // original members of each quotient state
  std::vector<std::size_t> class_map;             // original node -> quotient state
  Vector phi;
};

// Blocks are ordered by their smallest member. Labels of merged states join
// the member labels with '+'.
QuotientChain quotient_chain(const TransitionMatrix& p, const Vector& phi,
                             const std::vector<std::vector<std::size_t>>& partition);

// Collapses the listed classes one at a time, each collapse acting on the
// previous quotient. States end up in the same order as quotient_chain.
QuotientChain collapse_sequentially(const TransitionMatrix& p, const Vector& phi,
                                    const std::vector<std::vector<std::size_t>>& classes);

struct QuotientBoundViolation {
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  double d_prime = 0.0;
  double upper = 0.0;
  bool same_absolute_segment = false;
};

struct QuotientBoundsReport {
  std::size_t pairs_checked = 0;
  std::size_t same_segment_pairs = 0;
  std::size_t cross_segment_pairs = 0;
  std::size_t violation_count = 0;
  double worst_isometry_error = 0.0;
  // min over cross pairs of D' - D (must be > 0)
  double min_lower_gap = 0.0;
  // min over cross pairs of upper bound - D' (must be >= -tol)
  double min_upper_gap = 0.0;
  std::vector<QuotientBoundViolation> violations;  // first few only

  bool ok() const { return violation_count == 0; }
};

// For i in alpha, j in beta (alpha != beta): same absolute segment requires
// |D_ij - D'_ab| <= tol; otherwise D_ij < D'_ab <= D_ij + ln(|alpha||beta|)/2 + c ln 2 + tol,
// c = number of other non-singleton classes separating i from j.
QuotientBoundsReport check_quotient_bounds(const HpDistance& d, const HpDistance& d_prime, const QuotientChain& quotient,
                                           const std::vector<SegmentLabeling>& labelings, double tol = 1e-9);

/// Everything derived from one chain's d^{1/2} degeneracy structure.
struct QuotientAnalysis {
  StationaryDistribution phi;
  HittingProbabilities q;
  DegeneracyReport degeneracy;
  std::vector<OrderedClass> ordered;      // non-singleton classes only
  std::vector<SegmentLabeling> labelings;  // parallel to `ordered`
  std::vector<std::size_t> absolute;
  QuotientChain quotient;
  HpDistance d;
  HpDistance d_prime;
  QuotientBoundsReport bounds;
  DegeneracyReport quotient_degeneracy;
};

QuotientAnalysis analyze_quotient(const TransitionMatrix& p, double tol_deg = kDefaultDegeneracyTolerance,
                                  unsigned threads = 0);

}  // namespace hpm
