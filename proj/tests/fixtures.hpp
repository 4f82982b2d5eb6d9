#pragma once

#include "hpmetric/generators.hpp"
#include "hpmetric/graph.hpp"
#include "oracles.hpp"

namespace fixtures {

using hpm::Matrix;
using hpm::TransitionMatrix;

inline TransitionMatrix directed_cycle(std::size_t n) {
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((i + 1) % n)) = 1.0;
  return TransitionMatrix(p);
}

inline TransitionMatrix complete(std::size_t n) {
  Matrix p = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n - 1));
  p.diagonal().setZero();
  return TransitionMatrix(p);
}

inline TransitionMatrix two_state(double a, double b, double c, double d) {
  return TransitionMatrix((Matrix(2, 2) << a, b, c, d).finished());
}

inline TransitionMatrix glued(std::size_t nb, std::size_t nc, std::size_t branches) {
  return hpm::row_normalize(hpm::gen_glued_cycles({nb, nc, branches}));
}

inline TransitionMatrix random_chain(std::size_t n, std::uint64_t seed, double density = 0.15) {
  return TransitionMatrix(oracle::normalize_rows(oracle::random_irreducible_weights(n, density, seed)));
}

}  // namespace fixtures
