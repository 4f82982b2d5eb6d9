#include <doctest.h>

#include "fixtures.hpp"
#include "hpmetric/errors.hpp"
#include "hpmetric/generators.hpp"
#include "hpmetric/hitting.hpp"
#include "hpmetric/metric.hpp"
#include "hpmetric/stationary.hpp"

using namespace hpm;

TEST_SUITE("analysis") {
  TEST_CASE("glued cycles (3,4,2) structure") {
    const auto g = gen_glued_cycles({3, 4, 2});
    CHECK(g.size() == 11);
    CHECK(g.weights.nonZeros() == 12);  // (n_b - 1) + C (n_c + 1)
    CHECK(g.labels[0] == "b1");
    CHECK(g.labels[3] == "c1_1");
    CHECK(g.labels[10] == "c2_4");
    const Matrix w = g.dense();
    CHECK(w(0, 1) == 1.0);
    CHECK(w(2, 3) == 1.0);
    CHECK(w(2, 7) == 1.0);
    CHECK(w(6, 0) == 1.0);
    CHECK(w(10, 0) == 1.0);
    CHECK(is_strongly_connected(support_graph(g)));
  }

  TEST_CASE("one branch closes a single directed cycle") {
    const auto w = gen_glued_cycles({3, 5, 1}).dense();
    CHECK(w.sum() == 8.0);
    for (Eigen::Index i = 0; i < 8; ++i) CHECK(w(i, (i + 1) % 8) == 1.0);
  }

  TEST_CASE("(1,1,3): one backbone node and three one-node branches") {
    const auto w = gen_glued_cycles({1, 1, 3}).dense();
    CHECK(w.rows() == 4);
    for (Eigen::Index b = 1; b <= 3; ++b) {
      CHECK(w(0, b) == 1.0);
      CHECK(w(b, 0) == 1.0);
    }
    CHECK(w.sum() == 6.0);
  }

  TEST_CASE("glued cycles full pipeline and walk-length blindness") {
    Matrix reference;
    for (auto [nb, nc] : {std::pair<std::size_t, std::size_t>{3, 4}, {5, 55}, {1, 2}, {7, 3}}) {
      const auto p = fixtures::glued(nb, nc, 2);
      const auto d = hp_distance(hp_similarity(hitting_fast(p), stationary_distribution(p), 0.5));
      // pick representative nodes: first backbone node and first/last node of each branch
      const std::vector<Eigen::Index> reps{0, static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb + nc - 1),
                                           static_cast<Eigen::Index>(nb + nc),
                                           static_cast<Eigen::Index>(nb + 2 * nc - 1)};
      Matrix sub(5, 5);
      for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) sub(a, b) = d.d(reps[a], reps[b]);
      }
      if (reference.size() == 0) {
        reference = sub;
      } else {
        CHECK((sub - reference).cwiseAbs().maxCoeff() <= 1e-8);
      }
    }
  }

  TEST_CASE("ER+cycle construction") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto g = gen_er_cycle({}, seed);
      CHECK(g.size() == 28);
      CHECK(is_strongly_connected(support_graph(g)));
      const Matrix w = g.dense();
      CHECK(g.labels[0] == "er1");
      CHECK(g.labels[20] == "cyc1");
      for (Eigen::Index t = 0; t < 8; ++t) {
        const Eigen::Index c = 20 + t;
        CHECK(w(c, 20 + (t + 1) % 8) >= 1.0);
        // 19 draws with replacement, merged: between 1 and 19 distinct weight-3 sources
        int heavy = 0;
        for (Eigen::Index e = 0; e < 20; ++e) {
          if (w(e, c) == 3.0 || (e == 0 && c == 20 && w(e, c) == 4.0)) ++heavy;
        }
        CHECK(heavy >= 1);
        CHECK(heavy <= 19);
      }
      CHECK(w(20, 0) >= 1.0);
      CHECK(w(0, 20) >= 1.0);
      for (Eigen::Index e = 0; e < 20; ++e) CHECK(w(e, e) == 0.0);
      for (Eigen::Index a = 0; a < 20; ++a) {
        for (Eigen::Index b = 0; b < 20; ++b) {
          if (w(a, b) != 0.0) CHECK(w(a, b) == 1.0);
        }
      }
    }
  }

  TEST_CASE("ER+cycle draw count uses the ER block size") {
    // a distinct w makes the drawn in-edges visible
    ErCycleSpec spec;
    spec.n_er = 10;
    spec.n_cycle = 3;
    spec.p = 0.5;
    spec.w = 7.0;
    const auto w = gen_er_cycle(spec, 3).dense();
    for (Eigen::Index c = 10; c < 13; ++c) {
      int heavy = 0;
      for (Eigen::Index e = 0; e < 10; ++e) heavy += (w(e, c) >= 7.0);
      CHECK(heavy >= 1);
      CHECK(heavy <= 9);  // 2 round(10 * 0.5) - 1 draws
    }
  }

  TEST_CASE("ER+cycle with a single cycle node has a self-loop") {
    ErCycleSpec spec;
    spec.n_cycle = 1;
    const auto g = gen_er_cycle(spec, 2);
    CHECK(g.dense()(20, 20) == 1.0);
    CHECK(is_strongly_connected(support_graph(g)));
  }

  TEST_CASE("ER self-loops on request") {
    ErCycleSpec spec;
    spec.er_self_loops = true;
    spec.p = 1.0;
    const auto w = gen_er_cycle(spec, 0).dense();
    for (Eigen::Index e = 1; e < 20; ++e) CHECK(w(e, e) == 1.0);
  }

  TEST_CASE("ER+cycle reproducible per seed") {
    CHECK(gen_er_cycle({}, 9).dense() == gen_er_cycle({}, 9).dense());
    CHECK(gen_er_cycle({}, 9).dense() != gen_er_cycle({}, 10).dense());
  }

  TEST_CASE("planted partition extremes") {
    PlantedPartitionSpec full;
    full.n = 30;
    full.p_in = 1.0;
    full.p_out = 1.0;
    const auto complete = gen_planted_partition(full, 1);
    CHECK(complete.graph.weights.nonZeros() == 30 * 29);

    PlantedPartitionSpec split;
    split.n = 30;
    split.p_in = 1.0;
    split.p_out = 0.0;
    const auto parts = gen_planted_partition(split, 1);
    CHECK(parts.graph.weights.nonZeros() == 3 * 10 * 9);
    CHECK_FALSE(is_strongly_connected(support_graph(parts.graph)));
    CHECK(parts.truth[0] == 0);
    CHECK(parts.truth[29] == 2);
  }

  TEST_CASE("planted partition density concentration") {
    for (auto [pin, pout] : {std::pair{0.5, 0.05}, {0.44, 0.38}, {0.2, 0.1}}) {
      PlantedPartitionSpec spec;
      spec.p_in = pin;
      spec.p_out = pout;
      const auto g = gen_planted_partition(spec, 42);
      const Matrix w = g.graph.dense();
      double within = 0, across = 0;
      for (Eigen::Index i = 0; i < 300; ++i) {
        CHECK(w(i, i) == 0.0);
        for (Eigen::Index j = 0; j < 300; ++j) {
          if (i == j) continue;
          (g.truth[static_cast<std::size_t>(i)] == g.truth[static_cast<std::size_t>(j)] ? within : across) += w(i, j);
        }
      }
      const double m_in = 3.0 * 100 * 99, m_out = 300.0 * 299 - m_in;
      CHECK(std::abs(within / m_in - pin) <= 5 * std::sqrt(pin * (1 - pin) / m_in));
      CHECK(std::abs(across / m_out - pout) <= 5 * std::sqrt(pout * (1 - pout) / m_out));
    }
  }

  TEST_CASE("planted partition rho/delta parameterization") {
    const auto spec = PlantedPartitionSpec::from_rho_delta(300, 3, 0.40, 0.06);
    CHECK(std::abs(spec.p_in - 0.44) <= 1e-12);
    CHECK(std::abs(spec.p_out - 0.38) <= 1e-12);
    CHECK(std::abs(spec.rho() - 0.40) <= 1e-12);
    CHECK(std::abs(spec.delta() - 0.06) <= 1e-12);
    PlantedPartitionSpec bad;
    bad.n = 301;
    CHECK_THROWS_AS(gen_planted_partition(bad, 0), DomainError);
  }

  TEST_CASE("circle: antipodal points use the chord length") {
    const Matrix pts = (Matrix(2, 2) << 1, 0, -1, 0).finished();
    const auto g = geometric_from_points(GeometricDomain::circle, pts, 1.0);
    CHECK(std::abs(g.graph.dense()(0, 1) - std::exp(-4.0)) <= 1e-15);
    CHECK(g.graph.dense()(1, 0) == g.graph.dense()(0, 1));
    CHECK(g.graph.dense()(0, 0) == 0.0);
  }

  TEST_CASE("10x10 torus lattice: four unit out-neighbours each") {
    const auto g = gen_geometric({GeometricDomain::torus_lattice, 100, 1.0}, 0);
    const Matrix w = g.graph.dense();
    for (Eigen::Index i = 0; i < 100; ++i) {
      int count = 0;
      for (Eigen::Index j = 0; j < 100; ++j) {
        if (w(i, j) != 0.0) {
          CHECK(w(i, j) == 1.0);
          ++count;
        }
      }
      CHECK(count == 4);
    }
    CHECK_THROWS_AS(gen_geometric({GeometricDomain::torus_lattice, 99, 1.0}, 0), DomainError);
  }

  TEST_CASE("flat torus weights are translation invariant") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 2 * std::acos(-1.0));
    for (int t = 0; t < 20; ++t) {
      Matrix pts(2, 2);
      pts << u(rng), u(rng), u(rng), u(rng);
      Matrix moved = pts;
      const double dx = u(rng), dy = u(rng);
      for (Eigen::Index r = 0; r < 2; ++r) {
        moved(r, 0) = std::fmod(pts(r, 0) + dx, 2 * std::acos(-1.0));
        moved(r, 1) = std::fmod(pts(r, 1) + dy, 2 * std::acos(-1.0));
      }
      const double a = geometric_from_points(GeometricDomain::flat_torus, pts, 1.0).graph.dense()(0, 1);
      const double b = geometric_from_points(GeometricDomain::flat_torus, moved, 1.0).graph.dense()(0, 1);
      CHECK(std::abs(a - b) <= 1e-12);
    }
  }

  TEST_CASE("geometric samplers stay inside their domains") {
    const double pi = std::acos(-1.0);
    const auto hole = gen_geometric({GeometricDomain::torus_with_hole, 200, 1.0}, 3);
    for (Eigen::Index i = 0; i < 200; ++i) {
      CHECK(std::hypot(hole.coords(i, 0) - pi, hole.coords(i, 1) - pi) >= pi / 2);
    }
    const auto h = gen_geometric({GeometricDomain::h_domain, 200, 1.0}, 3);
    for (Eigen::Index i = 0; i < 200; ++i) {
      CHECK((std::abs(h.coords(i, 0) - pi) >= pi / 2 || std::abs(h.coords(i, 1) - pi) <= pi / 4));
    }
    const auto sphere = gen_geometric({GeometricDomain::sphere, 100, 1.0}, 3);
    CHECK((sphere.coords.rowwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);
    const auto circle = gen_geometric({GeometricDomain::circle, 100, 1.0}, 3);
    CHECK((circle.coords.rowwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(is_strongly_connected(support_graph(circle.graph)));
  }

  TEST_CASE("domain names round-trip") {
    for (auto d : {GeometricDomain::flat_torus, GeometricDomain::torus_with_hole, GeometricDomain::h_domain,
                   GeometricDomain::circle, GeometricDomain::sphere, GeometricDomain::torus_lattice}) {
      CHECK(parse_geometric_domain(to_string(d)) == d);
    }
    CHECK_THROWS_AS(parse_geometric_domain("klein-bottle"), UsageError);
  }

  TEST_CASE("random strongly connected digraphs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto g = gen_random_strongly_connected(5 + seed * 10, 0.05, seed);
      CHECK(is_strongly_connected(support_graph(g)));
    }
  }

  TEST_CASE("beaded cycles are degenerate with several classes") {
    const auto g = gen_beaded_cycle({{{2, 3}, {1.0, 2.0}}, {{0, 4}, {1.0, 1.0}}});
    CHECK(g.size() == 2 + 5 + 4);
    const auto p = row_normalize(g);
    const auto r = degenerate_pairs(hitting_fast(p), stationary_distribution(p));
    CHECK(r.nontrivial_classes().size() == 4);  // junctions, and the three chains of length >= 2
  }

  TEST_CASE("collapse gadget edges") {
    const auto w = gen_collapse_gadget(2, 3, 4, 5).dense();
    CHECK(w(0, 3) == 2.0);
    CHECK(w(0, 1) == 3.0);
    CHECK(w(3, 1) == 1.0);
    CHECK(w(1, 2) == 4.0);
    CHECK(w(1, 0) == 5.0);
    CHECK(w(2, 0) == 1.0);
    CHECK(w.sum() == 16.0);
  }
}
