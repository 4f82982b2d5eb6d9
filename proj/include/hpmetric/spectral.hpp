#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpmetric/graph.hpp"
#include "hpmetric/stationary.hpp"
#include "hpmetric/types.hpp"

namespace hpm {

enum class Symmetrization { additive, max, chung, hp };

Symmetrization parse_symmetrization(const std::string& name);
std::string to_string(Symmetrization kind);

/// Symmetric matrix derived from a chain: an adjacency for additive, max and
/// hp; the Laplacian itself for chung.
struct SymmetricOperator {
  Symmetrization kind = Symmetrization::additive;
  std::optional<double> beta;
  Matrix m;

  bool is_laplacian() const { return kind == Symmetrization::chung; }
};

// additive: (P + P^T)/2; max: max(P, P^T);
// chung: I - (Phi^{1/2} P Phi^{-1/2} + Phi^{-1/2} P^T Phi^{1/2})/2;
// hp: the normalized hitting-probability similarity at `beta` (required).
SymmetricOperator symmetrize(const TransitionMatrix& p, const StationaryDistribution& phi, Symmetrization kind,
                             std::optional<double> beta = std::nullopt, unsigned threads = 0);

// L = D - M with D the diagonal of row sums. M must be symmetric and nonnegative.
Matrix laplacian(const Matrix& m);

struct FiedlerResult {
  Vector vector;           // unit norm, largest-magnitude entry positive
  std::vector<int> signs;  // -1, 0, +1 with zero threshold 1e-8 * max|v|
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  bool small_gap = false;  // lambda3 - lambda2 <= 1e-12: pattern may depend on the basis
};

inline constexpr std::size_t kDenseEigenLimit = 2000;

// Dense symmetric eigensolver up to kDenseEigenLimit states, shift-invert
// block iteration on the lowest eigenpairs above that.
FiedlerResult fiedler_vector(const Matrix& laplacian);

// Laplacian of the operator (or the operator itself for chung) -> Fiedler vector.
FiedlerResult fiedler_vector(const SymmetricOperator& op);

}  // namespace hpm
