#include "hpmetric/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "hpmetric/errors.hpp"

namespace hpm {

namespace {

constexpr double kAsymmetryLimit = 1e-8;
constexpr double kHalfBetaRoundoff = 1e-12;
constexpr double kPhiClassTolerance = 1e-8;

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

HpSimilarity hp_similarity(const HittingProbabilities& q, const StationaryDistribution& phi, double beta) {
  if (!(beta >= 0.5) || !std::isfinite(beta)) {
    throw DomainError("beta must be a finite value >= 1/2");
  }
  const auto n = q.q.rows();
  if (phi.phi.size() != n) throw ConsistencyError("Q and phi have different sizes");

  Matrix a(n, n);
  // log-space so that tiny phi at large beta cannot underflow prematurely
  const Vector log_phi = phi.phi.array().log();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        a(i, j) = 1.0;
        continue;
      }
      a(i, j) = std::exp(beta * log_phi(i) - (1.0 - beta) * log_phi(j)) * q.q(i, j);
    }
  }
  HpSimilarity out;
  out.beta = beta;
  out.asymmetry = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (!(out.asymmetry <= kAsymmetryLimit)) {
    std::ostringstream msg;
    msg << "similarity asymmetry " << out.asymmetry << " exceeds " << kAsymmetryLimit
        << "; Q and phi do not describe the same chain";
    throw ConsistencyError(msg.str());
  }
  out.a = (a + a.transpose()) / 2.0;
  if (beta == 0.5) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (out.a(i, j) > 1.0 && out.a(i, j) <= 1.0 + kHalfBetaRoundoff) out.a(i, j) = 1.0;
      }
    }
  }
  return out;
}

HpDistance hp_distance(const HpSimilarity& a, double tol_deg) {
  const auto n = a.a.rows();
  HpDistance out;
  out.beta = a.beta;
  out.d.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = a.a(i, j);
      if (!(v > 0.0)) {
        throw DomainError("similarity entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is not positive");
      }
      out.d(i, j) = v == 1.0 ? 0.0 : -std::log(v);
    }
  }
  if (a.beta == 0.5) {
    for (Eigen::Index i = 0; i < n && !out.is_pseudo; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && out.d(i, j) < tol_deg) {
          out.is_pseudo = true;
          break;
        }
      }
    }
  }
  return out;
}

MetricAxiomReport verify_metric_axioms(const HpDistance& dist, const MetricAxiomOptions& options) {
  const auto& d = dist.d;
  const auto n = static_cast<std::size_t>(d.rows());
  MetricAxiomReport report;
  report.min_off_diagonal = std::numeric_limits<double>::infinity();
  report.worst_triangle_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) report.zero_diagonal_ok = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      report.worst_asymmetry = std::max(report.worst_asymmetry, std::abs(d(i, j) - d(j, i)));
      report.min_off_diagonal = std::min(report.min_off_diagonal, d(i, j));
    }
  }
  report.symmetry_ok = report.worst_asymmetry <= options.symmetry_tol;
  report.positivity_ok = n < 2 || report.min_off_diagonal > 0.0;
  if (n < 2) report.min_off_diagonal = 0.0;

  auto check = [&](std::size_t i, std::size_t k, std::size_t j) {
    const double slack = d(i, k) + d(k, j) - d(i, j);
    ++report.triples_checked;
    if (slack < report.worst_triangle_slack) {
      report.worst_triangle_slack = slack;
      report.worst_triple = {i, k, j};
    }
  };
  if (n <= options.exhaustive_limit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && i != k && j != k) check(i, k, j);
  } else {
    report.exhaustive = false;
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::uint64_t t = 0; t < options.sampled_triples; ++t) {
      const auto i = pick(rng), k = pick(rng), j = pick(rng);
      if (i != j && i != k && j != k) check(i, k, j);
    }
  }
  if (report.triples_checked == 0) report.worst_triangle_slack = 0.0;
  report.triangle_ok = report.worst_triangle_slack >= -options.triangle_tol;
  return report;
}

std::vector<std::vector<std::size_t>> DegeneracyReport::nontrivial_classes() const {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& c : classes) {
    if (c.size() > 1) out.push_back(c);
  }
  return out;
}

DegeneracyReport degenerate_pairs(const HittingProbabilities& q, const StationaryDistribution& phi, double tol_deg) {
  const auto n = q.size();
  if (phi.size() != n) throw ConsistencyError("Q and phi have different sizes");
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::min(q(i, j), q(j, i)) >= 1.0 - tol_deg) sets.unite(i, j);
    }
  }
  DegeneracyReport report;
  report.class_of.assign(n, 0);
  std::vector<std::size_t> root_to_class(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = sets.find(i);
    if (root_to_class[root] == n) {
      root_to_class[root] = report.classes.size();
      report.classes.emplace_back();
    }
    report.class_of[i] = root_to_class[root];
    report.classes[root_to_class[root]].push_back(i);
  }
  for (const auto& cls : report.classes) {
    if (cls.size() < 2) continue;
    report.degenerate = true;
    for (std::size_t a = 0; a < cls.size(); ++a) {
      for (std::size_t b = a + 1; b < cls.size(); ++b) {
        const auto i = cls[a], j = cls[b];
        if (std::min(q(i, j), q(j, i)) < 1.0 - 10.0 * tol_deg) {
          std::ostringstream msg;
          msg << "degenerate classes are not closed at tol_deg=" << tol_deg << ": states " << i << " and " << j
              << " were joined with min(Q_ij, Q_ji) = " << std::min(q(i, j), q(j, i))
              << "; retry with a smaller tolerance";
          throw ConsistencyError(msg.str());
        }
        const double scale = std::max(phi(i), phi(j));
        if (std::abs(phi(i) - phi(j)) > kPhiClassTolerance * scale) {
          throw ConsistencyError("states " + std::to_string(i) + " and " + std::to_string(j) +
                                 " are degenerate but have different invariant probability");
        }
      }
    }
  }
  return report;
}

}  // namespace hpm
