#pragma once

#include <cstddef>
#include <vector>

#include "hpmetric/types.hpp"

namespace hpm {

// Spearman rank correlation with average ranks for ties.
double spearman(const Vector& x, const Vector& y);

/// Distances from one reference node under d^{1/2}, d^1 and the ambient
/// distance, each rescaled to [0, 1] over the other nodes, ordered by d^{1/2}.
struct DistanceCurves {
  std::size_t reference = 0;
  std::vector<std::size_t> order;  // node ids, ascending d^{1/2}, reference excluded
  Vector d_half;
  Vector d_one;
  Vector ambient;
  double spearman_half = 0.0;  // d^{1/2} vs ambient
  double spearman_one = 0.0;   // d^1 vs ambient
};

DistanceCurves distance_curves(std::size_t reference, const Matrix& d_half, const Matrix& d_one, const Matrix& ambient);

}  // namespace hpm
