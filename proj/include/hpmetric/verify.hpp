#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "hpmetric/graph.hpp"
#include "hpmetric/metric.hpp"

namespace hpm {

enum class VerifyLevel { identity, metric, quotient, oracle };

VerifyLevel parse_verify_level(const std::string& name);
std::string to_string(VerifyLevel level);
// Comma-separated list, e.g. "identity,metric".
std::set<VerifyLevel> parse_verify_levels(const std::string& list);

struct VerifyOptions {
  std::set<VerifyLevel> levels{VerifyLevel::identity, VerifyLevel::metric};
  std::vector<double> betas{0.5, 0.75, 1.0};
  double tol_deg = kDefaultDegeneracyTolerance;
  double balance_tol = 1e-10;
  double submultiplicative_tol = 1e-10;
  // oracle level
  std::uint64_t walks = 100'000;
  std::uint64_t seed = 0;
  std::size_t max_oracle_pairs = 6;
  double oracle_sigmas = 4.0;
  unsigned threads = 0;
};

struct VerifyCheck {
  std::string level;
  std::string name;
  bool passed = true;
  double value = 0.0;      // the measured quantity (worst case)
  double tolerance = 0.0;  // what it was compared against
  std::string detail;
};

struct VerifyReport {
  std::size_t n = 0;
  std::vector<VerifyCheck> checks;

  bool ok() const;
};

// Runs every requested level on the chain. Violations are reported, not thrown.
VerifyReport verify_chain(const TransitionMatrix& p, const VerifyOptions& options);

}  // namespace hpm
