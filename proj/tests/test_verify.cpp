#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "hpmetric/errors.hpp"
#include "hpmetric/verify.hpp"

using namespace hpm;

namespace {

const VerifyCheck* find_check(const VerifyReport& r, const std::string& level, const std::string& prefix) {
  for (const auto& c : r.checks) {
    if (c.level == level && c.name.rfind(prefix, 0) == 0) return &c;
  }
  return nullptr;
}

std::size_t count_level(const VerifyReport& r, const std::string& level) {
  return static_cast<std::size_t>(
      std::count_if(r.checks.begin(), r.checks.end(), [&](const VerifyCheck& c) { return c.level == level; }));
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("level parsing") {
    CHECK(parse_verify_level("oracle") == VerifyLevel::oracle);
    CHECK(to_string(VerifyLevel::quotient) == "quotient");
    const auto levels = parse_verify_levels("identity,quotient");
    CHECK(levels.size() == 2);
    CHECK(levels.count(VerifyLevel::quotient) == 1);
    CHECK_THROWS_AS(parse_verify_level("everything"), UsageError);
    CHECK_THROWS_AS(parse_verify_levels(""), UsageError);
  }

  TEST_CASE("default levels pass on random chains") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto r = verify_chain(fixtures::random_chain(30, seed), {});
      CHECK(r.ok());
      CHECK(r.n == 30);
      CHECK(count_level(r, "identity") == 5);
      CHECK(count_level(r, "metric") == 12);  // four checks at each of three betas
      CHECK(count_level(r, "quotient") == 0);
    }
  }

  TEST_CASE("glued cycles: pseudo-metric at 1/2, quotient bounds hold") {
    VerifyOptions opts;
    opts.levels = {VerifyLevel::identity, VerifyLevel::metric, VerifyLevel::quotient};
    const auto r = verify_chain(fixtures::glued(3, 4, 2), opts);
    CHECK(r.ok());
    const auto* pos = find_check(r, "metric", "positivity beta=0.5");
    REQUIRE(pos != nullptr);
    CHECK(pos->detail.find("pseudo") != std::string::npos);
    const auto* bounds = find_check(r, "quotient", "bounds");
    REQUIRE(bounds != nullptr);
    CHECK(bounds->detail.find("3 quotient states") == 0);
  }

  TEST_CASE("oracle level on K3") {
    VerifyOptions opts;
    opts.levels = {VerifyLevel::oracle};
    opts.walks = 20'000;
    opts.seed = 4;
    const auto r = verify_chain(fixtures::complete(3), opts);
    CHECK(r.ok());
    CHECK(count_level(r, "oracle") == 12);  // all 6 ordered pairs, two checks each
  }

  TEST_CASE("a tightened tolerance is reported, not thrown") {
    VerifyOptions opts;
    opts.levels = {VerifyLevel::identity};
    opts.balance_tol = 0.0;
    opts.submultiplicative_tol = -1.0;  // demands strict slack of 1, impossible
    const auto r = verify_chain(fixtures::random_chain(20, 3), opts);
    CHECK_FALSE(r.ok());
    const auto* sub = find_check(r, "identity", "submultiplicativity");
    REQUIRE(sub != nullptr);
    CHECK_FALSE(sub->passed);
  }

  TEST_CASE("beta above one still runs the four axiom checks") {
    VerifyOptions opts;
    opts.levels = {VerifyLevel::metric};
    opts.betas = {3.0};
    const auto r = verify_chain(fixtures::glued(1, 1, 3), opts);
    CHECK(r.n == 4);
    CHECK(count_level(r, "metric") == 4);
  }
}
