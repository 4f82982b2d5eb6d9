#include "hpmetric/stationary.hpp"

#include <sstream>

#include "hpmetric/errors.hpp"

namespace hpm {

namespace {
constexpr double kResidualTolerance = 1e-10;
constexpr double kRoundoffNegative = 1e-13;
constexpr double kClampValue = 1e-300;
}  // namespace

StationaryDistribution stationary_distribution(const TransitionMatrix& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix system = p.matrix().transpose() - Matrix::Identity(n, n);
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;

  Vector phi = system.partialPivLu().solve(rhs);

  for (Eigen::Index i = 0; i < n; ++i) {
    if (phi(i) > 0.0) continue;
    if (phi(i) < -kRoundoffNegative || !std::isfinite(phi(i))) {
      std::ostringstream msg;
      msg << "stationary solve produced phi[" << p.labels()[static_cast<std::size_t>(i)] << "] = " << phi(i);
      throw NumericalError(msg.str());
    }
    phi(i) = kClampValue;
  }
  phi /= phi.sum();

  StationaryDistribution out;
  out.residual = (p.matrix().transpose() * phi - phi).lpNorm<Eigen::Infinity>();
  if (!(out.residual <= kResidualTolerance)) {
    std::ostringstream msg;
    msg << "stationary residual " << out.residual << " exceeds " << kResidualTolerance;
    throw NumericalError(msg.str());
  }
  out.phi = std::move(phi);
  return out;
}

}  // namespace hpm
