#include "hpmetric/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hpmetric/errors.hpp"
#include "hpmetric/hitting.hpp"
#include "hpmetric/quotient.hpp"
#include "hpmetric/stationary.hpp"

namespace hpm {

namespace {

constexpr std::size_t kExhaustiveTripleLimit = 500;
constexpr std::uint64_t kSampledTriples = 1'000'000;
// absolute slack on Monte Carlo comparisons, covers SE = 0 with an exact target
constexpr double kOracleFloor = 1e-9;

std::string describe_pair(const TransitionMatrix& p, std::size_t i, std::size_t j) {
  return p.labels()[i] + "->" + p.labels()[j];
}

void identity_checks(const TransitionMatrix& p, const StationaryDistribution& phi, const HittingProbabilities& q,
                     const VerifyOptions& options, VerifyReport& report) {
  const auto n = static_cast<Eigen::Index>(p.size());

  report.checks.push_back({"identity", "stationary_residual", phi.residual <= 1e-10, phi.residual, 1e-10, ""});

  double worst_balance = 0.0;
  double min_q = n > 1 ? 1.0 : 0.0;
  double max_q = 0.0;
  double half_beta_error = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      worst_balance = std::max(worst_balance, std::abs(q.q(i, j) * phi.phi(i) - q.q(j, i) * phi.phi(j)));
      min_q = std::min(min_q, q.q(i, j));
      max_q = std::max(max_q, q.q(i, j));
    }
  }
  report.checks.push_back({"identity", "detailed_balance", worst_balance <= options.balance_tol, worst_balance,
                           options.balance_tol, "max |Q_ij phi_i - Q_ji phi_j|"});
  report.checks.push_back({"identity", "q_range", n < 2 || (min_q > 0.0 && max_q <= 1.0), min_q, 0.0,
                           "0 < Q_ij <= 1 off the diagonal; value is the minimum"});

  const auto a = hp_similarity(q, phi, 0.5);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) half_beta_error = std::max(half_beta_error, std::abs(a.a(i, j) - std::sqrt(q.q(i, j) * q.q(j, i))));
    }
  }
  report.checks.push_back({"identity", "half_beta_geometric_mean", half_beta_error <= 1e-10, half_beta_error, 1e-10,
                           "max |A_ij - sqrt(Q_ij Q_ji)| at beta = 1/2"});

  // Q_ij >= Q_ik Q_kj
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t checked = 0;
  auto visit = [&](Eigen::Index i, Eigen::Index k, Eigen::Index j) {
    if (i == k || k == j || i == j) return;
    worst = std::min(worst, q.q(i, j) - q.q(i, k) * q.q(k, j));
    ++checked;
  };
  if (p.size() <= kExhaustiveTripleLimit) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < n; ++j) visit(i, k, j);
      }
    }
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    for (std::uint64_t t = 0; t < kSampledTriples; ++t) visit(pick(rng), pick(rng), pick(rng));
  }
  if (checked == 0) worst = 0.0;
  std::ostringstream detail;
  detail << "min Q_ij - Q_ik Q_kj over " << checked << " triples";
  report.checks.push_back({"identity", "submultiplicativity", worst >= -options.submultiplicative_tol, worst,
                           -options.submultiplicative_tol, detail.str()});
}

void metric_checks(const StationaryDistribution& phi, const HittingProbabilities& q, const VerifyOptions& options,
                   VerifyReport& report) {
  for (const double beta : options.betas) {
    const auto d = hp_distance(hp_similarity(q, phi, beta), options.tol_deg);
    MetricAxiomOptions axiom_options;
    axiom_options.seed = options.seed;
    const auto axioms = verify_metric_axioms(d, axiom_options);
    std::ostringstream tag;
    tag << "beta=" << beta;
    report.checks.push_back({"metric", "symmetry " + tag.str(), axioms.symmetry_ok, axioms.worst_asymmetry,
                             axiom_options.symmetry_tol, ""});
    report.checks.push_back({"metric", "triangle " + tag.str(), axioms.triangle_ok, axioms.worst_triangle_slack,
                             -axiom_options.triangle_tol, "worst d_ik + d_kj - d_ij"});
    report.checks.push_back({"metric", "zero_diagonal " + tag.str(), axioms.zero_diagonal_ok, 0.0, 0.0, ""});
    // at beta = 1/2 zero distances are legitimate (pseudo-metric)
    const bool needs_positive = beta > 0.5;
    report.checks.push_back({"metric", "positivity " + tag.str(), !needs_positive || axioms.positivity_ok,
                             axioms.min_off_diagonal, 0.0,
                             needs_positive ? "min off-diagonal distance"
                                            : (d.is_pseudo ? "pseudo-metric: degenerate pairs present" : "metric")});
  }
}

void quotient_checks(const TransitionMatrix& p, const VerifyOptions& options, VerifyReport& report) {
  const auto analysis = analyze_quotient(p, options.tol_deg, options.threads);
  const auto& b = analysis.bounds;
  std::ostringstream detail;
  detail << analysis.quotient.p.size() << " quotient states, " << b.same_segment_pairs << " same-segment and "
         << b.cross_segment_pairs << " cross-segment pairs";
  report.checks.push_back({"quotient", "bounds", b.ok(), static_cast<double>(b.violation_count), 0.0, detail.str()});
  report.checks.push_back({"quotient", "isometry_within_segments", b.worst_isometry_error <= 1e-9,
                           b.worst_isometry_error, 1e-9, ""});
  const bool clean = !analysis.quotient_degeneracy.degenerate;
  report.checks.push_back({"quotient", "quotient_degeneracy_free", clean,
                           static_cast<double>(analysis.quotient_degeneracy.nontrivial_classes().size()), 0.0, ""});
  double phi_error = 0.0;
  for (std::size_t u = 0; u < analysis.quotient.classes.size(); ++u) {
    double mass = 0.0;
    for (const auto i : analysis.quotient.classes[u]) mass += analysis.phi(i);
    phi_error = std::max(phi_error, std::abs(mass - analysis.quotient.phi(static_cast<Eigen::Index>(u))));
  }
  report.checks.push_back({"quotient", "phi_conservation", phi_error <= 1e-10, phi_error, 1e-10, ""});
}

void oracle_checks(const TransitionMatrix& p, const StationaryDistribution& phi, const HittingProbabilities& q,
                   const VerifyOptions& options, VerifyReport& report) {
  const std::size_t n = p.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  if (pairs.size() > options.max_oracle_pairs) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(options.max_oracle_pairs);
    std::sort(pairs.begin(), pairs.end());
  }
  std::uint64_t stream = options.seed;
  for (const auto& [i, j] : pairs) {
    const auto hit = simulate_hit_before_return(p, i, j, options.walks, stream++, options.threads);
    const double exact = q(i, j);
    const double err = std::abs(hit.mean - exact);
    const double bound = options.oracle_sigmas * hit.std_error + kOracleFloor;
    std::ostringstream d1;
    d1 << describe_pair(p, i, j) << ": estimate " << hit.mean << " exact " << exact << " se " << hit.std_error;
    report.checks.push_back({"oracle", "hit_before_return " + describe_pair(p, i, j), err <= bound, err, bound, d1.str()});

    const auto visits = simulate_visit_counts(p, i, j, options.walks, stream++, options.threads);
    const double ratio = phi(j) / phi(i);
    const double verr = std::abs(visits.mean - ratio);
    const double vbound = options.oracle_sigmas * visits.std_error + kOracleFloor;
    std::ostringstream d2;
    d2 << describe_pair(p, i, j) << ": mean visits " << visits.mean << " phi_j/phi_i " << ratio << " se "
       << visits.std_error;
    report.checks.push_back({"oracle", "visit_counts " + describe_pair(p, i, j), verr <= vbound, verr, vbound, d2.str()});
  }
}

}  // namespace

VerifyLevel parse_verify_level(const std::string& name) {
  if (name == "identity") return VerifyLevel::identity;
  if (name == "metric") return VerifyLevel::metric;
  if (name == "quotient") return VerifyLevel::quotient;
  if (name == "oracle") return VerifyLevel::oracle;
  throw UsageError("unknown verification level '" + name + "'");
}

std::string to_string(VerifyLevel level) {
  switch (level) {
    case VerifyLevel::identity:
      return "identity";
    case VerifyLevel::metric:
      return "metric";
    case VerifyLevel::quotient:
      return "quotient";
    case VerifyLevel::oracle:
      return "oracle";
  }
  return "unknown";
}

std::set<VerifyLevel> parse_verify_levels(const std::string& list) {
  std::set<VerifyLevel> levels;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) levels.insert(parse_verify_level(item));
  }
  if (levels.empty()) throw UsageError("no verification levels given");
  return levels;
}

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

VerifyReport verify_chain(const TransitionMatrix& p, const VerifyOptions& options) {
  VerifyReport report;
  report.n = p.size();
  const auto phi = stationary_distribution(p);
  HittingOptions hopts;
  hopts.threads = options.threads;
  const auto q = hitting_fast(p, hopts);
  if (options.levels.contains(VerifyLevel::identity)) identity_checks(p, phi, q, options, report);
  if (options.levels.contains(VerifyLevel::metric)) metric_checks(phi, q, options, report);
  if (options.levels.contains(VerifyLevel::quotient)) quotient_checks(p, options, report);
  if (options.levels.contains(VerifyLevel::oracle)) oracle_checks(p, phi, q, options, report);
  return report;
}

}  // namespace hpm
