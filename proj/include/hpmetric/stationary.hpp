#pragma once

#include "hpmetric/graph.hpp"
#include "hpmetric/types.hpp"

namespace hpm {

/// Invariant distribution: phi > 0, sum(phi) = 1, P^T phi = phi.
struct StationaryDistribution {
  Vector phi;
  // ||P^T phi - phi||_inf after the solve
  double residual = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(phi.size()); }
  double operator()(std::size_t i) const { return phi(static_cast<Eigen::Index>(i)); }
};

// Direct LU solve of (P^T - I) phi = 0 with the last balance equation swapped
// for sum(phi) = 1; exact for periodic chains. Throws NumericalError when the
// residual exceeds 1e-10 or a component is negative beyond round-off.
StationaryDistribution stationary_distribution(const TransitionMatrix& p);

}  // namespace hpm
