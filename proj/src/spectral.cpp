#include "hpmetric/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "hpmetric/errors.hpp"
#include "hpmetric/hitting.hpp"
#include "hpmetric/metric.hpp"

namespace hpm {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kSignThreshold = 1e-8;
constexpr double kGapTolerance = 1e-12;

void require_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DomainError(std::string(what) + " must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw DomainError(std::string(what) + " is not symmetric");
  }
}

struct EigenPairs {
  Vector values;   // ascending
  Matrix vectors;  // matching columns
};

// Lowest eigenpairs of a PSD matrix via block inverse iteration on
// L + shift*I with Rayleigh-Ritz after every sweep.
EigenPairs lowest_eigenpairs(const Matrix& l, Eigen::Index count) {
  const auto n = l.rows();
  const double norm = std::max(l.cwiseAbs().rowwise().sum().maxCoeff(), 1.0);
  const double shift = norm * 1e-10;
  const Eigen::LLT<Matrix> factor(l + shift * Matrix::Identity(n, n));
  if (factor.info() != Eigen::Success) throw NumericalError("shifted Laplacian factorization failed");

  const Eigen::Index block = std::min<Eigen::Index>(count + 2, n);
  Matrix basis(n, block);
  // deterministic start vectors
  for (Eigen::Index c = 0; c < block; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      basis(i, c) = std::cos(static_cast<double>((c + 1) * (i + 1)) * 0.7 + 0.3 * static_cast<double>(c));
    }
  }
  EigenPairs out;
  for (int iter = 0; iter < 2000; ++iter) {
    basis = factor.solve(basis);
    const Eigen::HouseholderQR<Matrix> qr(basis);
    basis = qr.householderQ() * Matrix::Identity(n, block);
    const Matrix projected = basis.transpose() * l * basis;
    const Eigen::SelfAdjointEigenSolver<Matrix> ritz((projected + projected.transpose()) / 2.0);
    basis = basis * ritz.eigenvectors();
    out.values = ritz.eigenvalues();
    const Matrix residual =
        l * basis.leftCols(count) - basis.leftCols(count) * out.values.head(count).asDiagonal();
    if (residual.colwise().norm().maxCoeff() <= 1e-10 * norm) break;
  }
  out.vectors = std::move(basis);
  return out;
}

}  // namespace

Symmetrization parse_symmetrization(const std::string& name) {
  if (name == "additive") return Symmetrization::additive;
  if (name == "max") return Symmetrization::max;
  if (name == "chung") return Symmetrization::chung;
  if (name == "hp") return Symmetrization::hp;
  throw UsageError("unknown symmetrization '" + name + "' (additive, max, chung, hp)");
}

std::string to_string(Symmetrization kind) {
  switch (kind) {
    case Symmetrization::additive:
      return "additive";
    case Symmetrization::max:
      return "max";
    case Symmetrization::chung:
      return "chung";
    case Symmetrization::hp:
      return "hp";
  }
  return "unknown";
}

SymmetricOperator symmetrize(const TransitionMatrix& p, const StationaryDistribution& phi, Symmetrization kind,
                             std::optional<double> beta, unsigned threads) {
  const auto& pm = p.matrix();
  const auto n = pm.rows();
  if (kind == Symmetrization::hp && !beta) throw UsageError("hp symmetrization needs beta");
  if (kind != Symmetrization::hp && beta) throw UsageError("beta only applies to the hp symmetrization");
  SymmetricOperator op;
  op.kind = kind;
  op.beta = beta;
  switch (kind) {
    case Symmetrization::additive:
      op.m = (pm + pm.transpose()) / 2.0;
      break;
    case Symmetrization::max:
      op.m = pm.cwiseMax(pm.transpose());
      break;
    case Symmetrization::chung: {
      const Vector root = phi.phi.cwiseSqrt();
      const Matrix conjugated = root.asDiagonal() * pm * root.cwiseInverse().asDiagonal();
      op.m = Matrix::Identity(n, n) - (conjugated + conjugated.transpose()) / 2.0;
      break;
    }
    case Symmetrization::hp: {
      const auto q = hitting_fast(p, {.threads = threads});
      op.m = hp_similarity(q, phi, *beta).a;
      break;
    }
  }
  return op;
}

Matrix laplacian(const Matrix& m) {
  require_symmetric(m, "adjacency");
  if (m.minCoeff() < 0.0) throw DomainError("adjacency has negative entries");
  const auto n = m.rows();
  Matrix l = -m;
  for (Eigen::Index i = 0; i < n; ++i) {
    double degree = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) degree += m(i, j);
    }
    l(i, i) = degree;
  }
  return l;
}

FiedlerResult fiedler_vector(const Matrix& l) {
  require_symmetric(l, "Laplacian");
  const auto n = l.rows();
  if (n < 2) throw DomainError("Fiedler vector needs at least two states");

  Matrix vectors;
  Vector values;
  if (static_cast<std::size_t>(n) <= kDenseEigenLimit) {
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(l);
    if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    vectors = solver.eigenvectors();
    values = solver.eigenvalues();
  } else {
    auto pairs = lowest_eigenpairs(l, 3);
    vectors = std::move(pairs.vectors);
    values = std::move(pairs.values);
  }

  FiedlerResult out;
  out.lambda2 = values(1);
  out.lambda3 = n > 2 ? values(2) : values(1);
  out.small_gap = n > 2 && std::abs(out.lambda3 - out.lambda2) <= kGapTolerance;
  Vector v = vectors.col(1);
  v /= v.norm();
  const double peak = v.cwiseAbs().maxCoeff();
  Eigen::Index lead = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v(i)) >= peak * (1.0 - 1e-12)) {
      lead = i;
      break;
    }
  }
  if (v(lead) < 0.0) v = -v;
  out.signs.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.signs[static_cast<std::size_t>(i)] = std::abs(v(i)) <= kSignThreshold * peak ? 0 : (v(i) > 0.0 ? 1 : -1);
  }
  out.vector = std::move(v);
  return out;
}

FiedlerResult fiedler_vector(const SymmetricOperator& op) {
  return fiedler_vector(op.is_laplacian() ? op.m : laplacian(op.m));
}

}  // namespace hpm
