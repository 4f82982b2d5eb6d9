#include <doctest.h>

#include "fixtures.hpp"
#include "hpmetric/errors.hpp"
#include "hpmetric/hitting.hpp"
#include "hpmetric/quotient.hpp"
#include "hpmetric/stationary.hpp"

using namespace hpm;

namespace {

constexpr std::size_t A = 0, B = 1, I = 2, J = 3;  // gadget node ids

// First class member reachable from v by a brute-force search that never
// steps through another member.
std::set<std::size_t> first_members(const Matrix& p, std::size_t v, const std::vector<std::size_t>& members) {
  const std::set<std::size_t> avoid(members.begin(), members.end());
  std::set<std::size_t> out;
  for (auto u : oracle::reachable_avoiding(p, v, avoid)) {
    if (avoid.contains(u) && u != v) out.insert(u);
  }
  return out;
}

}  // namespace

TEST_SUITE("quotient") {
  TEST_CASE("order_class on a directed 4-cycle follows the cycle") {
    const auto p = fixtures::directed_cycle(4);
    const std::vector<std::size_t> members{2, 0, 3, 1};
    CHECK(order_class(p, members).members == std::vector<std::size_t>{0, 1, 2, 3});
  }

  TEST_CASE("order_class on the glued backbone") {
    const auto p = fixtures::glued(3, 4, 2);
    const std::vector<std::size_t> backbone{0, 1, 2};
    CHECK(order_class(p, backbone).members == std::vector<std::size_t>{0, 1, 2});
    const std::vector<std::size_t> branch{6, 4, 5, 3};
    CHECK(order_class(p, branch).members == std::vector<std::size_t>{3, 4, 5, 6});
  }

  TEST_CASE("gadget class {a, b} is ordered (a, b)") {
    const auto p = row_normalize(gen_collapse_gadget());
    const std::vector<std::size_t> members{B, A};
    const auto ordered = order_class(p, members);
    CHECK(ordered.members == std::vector<std::size_t>{A, B});
    // brute force: from a the only first member is b and vice versa
    CHECK(first_members(p.matrix(), A, ordered.members) == std::set<std::size_t>{B});
    CHECK(first_members(p.matrix(), B, ordered.members) == std::set<std::size_t>{A});
  }

  TEST_CASE("order_class refuses a set that is not a class") {
    const auto p = fixtures::complete(4);
    const std::vector<std::size_t> members{0, 1, 2};
    CHECK_THROWS_AS(order_class(p, members), StructureError);
  }

  TEST_CASE("segments: gadget and glued backbone agree with brute force") {
    const auto gadget = row_normalize(gen_collapse_gadget());
    const std::vector<std::size_t> ab{A, B};
    const auto seg = segments(gadget, order_class(gadget, ab));
    CHECK_FALSE(seg.segment[A].has_value());
    CHECK_FALSE(seg.segment[B].has_value());
    CHECK(seg.segment[J] == 1u);  // between a and b
    CHECK(seg.segment[I] == 0u);  // between b and a

    const auto glued = fixtures::glued(3, 4, 2);
    const std::vector<std::size_t> backbone{0, 1, 2};
    const auto cls = order_class(glued, backbone);
    const auto bseg = segments(glued, cls);
    for (std::size_t v = 3; v < 11; ++v) {
      CHECK(bseg.segment[v] == 0u);
      const auto first = first_members(glued.matrix(), v, cls.members);
      CHECK(first == std::set<std::size_t>{0});
    }
  }

  TEST_CASE("segments of a full cycle class are empty") {
    const auto p = fixtures::directed_cycle(5);
    const std::vector<std::size_t> all{0, 1, 2, 3, 4};
    const auto seg = segments(p, order_class(p, all));
    for (const auto& s : seg.segment) CHECK_FALSE(s.has_value());
  }

  TEST_CASE("absolute segments") {
    const auto gadget = row_normalize(gen_collapse_gadget());
    const std::vector<std::size_t> ab{A, B};
    const auto seg = segments(gadget, order_class(gadget, ab));
    const auto single = absolute_segments(4, {seg});
    CHECK(single[I] != single[J]);
    CHECK(single[A] == single[B]);

    const auto none = absolute_segments(5, {});
    CHECK(std::all_of(none.begin(), none.end(), [](auto s) { return s == 0; }));

    const auto qa = analyze_quotient(fixtures::glued(3, 4, 2));
    REQUIRE(qa.labelings.size() == 3);
    const auto& abs = qa.absolute;
    CHECK(abs[0] == abs[1]);
    CHECK(abs[1] == abs[2]);
    CHECK(abs[3] == abs[6]);
    CHECK(abs[7] == abs[10]);
    CHECK(abs[0] != abs[3]);
    CHECK(abs[0] != abs[7]);
    CHECK(abs[3] != abs[7]);
  }

  TEST_CASE("quotient of a single-class chain is the 1-state chain") {
    for (std::size_t n : {2u, 3u, 7u}) {
      const auto p = fixtures::directed_cycle(n);
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), 0);
      const auto q = quotient_chain(p, stationary_distribution(p).phi, {all});
      CHECK(q.p.size() == 1);
      CHECK(q.p(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(std::abs(q.phi(0) - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("gadget collapse: Q'(alpha, j) = Q(a, j) / 2 and the cross-segment pair shrinks") {
    for (auto w : {std::array<double, 4>{1, 1, 1, 1}, {2, 1, 3, 0.5}, {0.3, 4, 1, 2}}) {
      const auto p = row_normalize(gen_collapse_gadget(w[0], w[1], w[2], w[3]));
      const auto phi = stationary_distribution(p);
      const auto quotient = quotient_chain(p, phi.phi, {{A, B}, {I}, {J}});
      REQUIRE(quotient.p.size() == 3);
      const auto alpha = quotient.class_map[A];
      const auto qi = quotient.class_map[I];
      const auto qj = quotient.class_map[J];
      const double q_aj = oracle::hitting_probability(p.matrix(), A, J);
      const double q_alpha_j = oracle::hitting_probability(quotient.p.matrix(), alpha, qj);
      CHECK(std::abs(q_alpha_j - 0.5 * q_aj) <= 1e-12);
      const double q_ij = oracle::hitting_probability(p.matrix(), I, J);
      const double qp_ij = oracle::hitting_probability(quotient.p.matrix(), qi, qj);
      CHECK(0.5 * q_ij < qp_ij);
      CHECK(qp_ij < q_ij);
    }
  }

  TEST_CASE("non-degenerate chains: the quotient is the identity") {
    const auto qa = analyze_quotient(fixtures::random_chain(15, 6, 0.2));
    CHECK(qa.ordered.empty());
    CHECK(qa.quotient.p.size() == 15);
    CHECK((qa.d.d - qa.d_prime.d).cwiseAbs().maxCoeff() == 0.0);
    CHECK(qa.bounds.ok());
    CHECK(qa.bounds.cross_segment_pairs == 0);
  }

  TEST_CASE("glued cycles: 3 states, bounds hold, degeneracy removed") {
    const auto qa = analyze_quotient(fixtures::glued(3, 4, 2));
    CHECK(qa.quotient.p.size() == 3);
    CHECK(qa.bounds.ok());
    CHECK(qa.bounds.min_lower_gap > 0.0);
    CHECK(qa.bounds.min_upper_gap >= -1e-9);
    CHECK_FALSE(qa.quotient_degeneracy.degenerate);
    CHECK_FALSE(qa.d_prime.is_pseudo);
    // backbone <-> branch reaches the upper bound (1/2) ln(3 * 4) + c ln 2 with c = 0
    const double upper = qa.d.d(0, 3) + 0.5 * std::log(12.0);
    CHECK(std::abs(qa.d_prime.d(0, 1) - upper) <= 1e-9);
  }

  TEST_CASE("degeneracy-free quotients and conserved mass on beaded cycles") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto qa = analyze_quotient(row_normalize(gen_random_beaded_cycle(seed)));
      CHECK(qa.ordered.size() >= 2);
      CHECK(qa.bounds.ok());
      CHECK_FALSE(qa.quotient_degeneracy.degenerate);
      for (std::size_t u = 0; u < qa.quotient.classes.size(); ++u) {
        double mass = 0.0;
        for (auto v : qa.quotient.classes[u]) mass += qa.phi(v);
        CHECK(std::abs(mass - qa.quotient.phi(static_cast<Eigen::Index>(u))) <= 1e-10);
      }
      CHECK(std::abs(qa.quotient.phi.sum() - 1.0) <= 1e-12);
      CHECK((qa.quotient.p.matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("sequential collapse equals simultaneous collapse") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto p = row_normalize(gen_random_beaded_cycle(seed + 50));
      const auto qa = analyze_quotient(p);
      std::vector<std::vector<std::size_t>> classes;
      for (const auto& c : qa.ordered) classes.push_back(c.members);
      const auto together = quotient_chain(p, qa.phi.phi, qa.degeneracy.classes);
      auto forward = collapse_sequentially(p, qa.phi.phi, classes);
      std::reverse(classes.begin(), classes.end());
      auto backward = collapse_sequentially(p, qa.phi.phi, classes);
      CHECK((forward.p.matrix() - together.p.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((backward.p.matrix() - together.p.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(forward.class_map == together.class_map);
      CHECK(backward.class_map == together.class_map);
    }
  }

  TEST_CASE("degenerate only up to round-off is refused") {
    Matrix w = Matrix::Zero(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) w(i, (i + 1) % 4) = 1.0;
    w(0, 2) = 1e-13;
    CHECK_THROWS_AS(analyze_quotient(row_normalize(WeightedDigraph::from_dense(w))), StructureError);
  }

  TEST_CASE("invalid partitions") {
    const auto p = fixtures::complete(3);
    const Vector phi = Vector::Constant(3, 1.0 / 3.0);
    CHECK_THROWS_AS(quotient_chain(p, phi, {{0, 1}}), DomainError);
    CHECK_THROWS_AS(quotient_chain(p, phi, {{0, 1}, {1, 2}}), DomainError);
  }
}
