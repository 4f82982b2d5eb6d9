#include <doctest.h>

#include <sstream>

#include "hpmetric/errors.hpp"
#include "hpmetric/graph.hpp"
#include "oracles.hpp"

using namespace hpm;

namespace {

WeightedDigraph csv(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in, EdgeListFormat::csv);
}

WeightedDigraph dense(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return WeightedDigraph::from_dense(m);
}

}  // namespace

TEST_SUITE("graph_core") {
  TEST_CASE("csv edge list in first-appearance order") {
    const auto g = csv("a,b,1\nb,a,1");
    CHECK(g.labels == std::vector<std::string>{"a", "b"});
    const Matrix expected = (Matrix(2, 2) << 0, 1, 1, 0).finished();
    CHECK(g.dense() == expected);
  }

  TEST_CASE("duplicate csv rows sum their weights") {
    const auto g = csv("a,b,1\na,b,2\nb,a\n");
    CHECK(g.dense()(0, 1) == 3.0);
    CHECK(g.dense()(1, 0) == 1.0);
  }

  TEST_CASE("csv comments, blank lines and default weights") {
    const auto g = csv("# trips\n\nx,y\ny,z,2.5\n# end\nz,x\n");
    CHECK(g.size() == 3);
    CHECK(g.dense()(1, 2) == 2.5);
    CHECK(g.dense()(0, 1) == 1.0);
  }

  TEST_CASE("csv self-loops are kept") {
    const auto g = csv("a,a,2\na,b\nb,a\n");
    CHECK(g.dense()(0, 0) == 2.0);
  }

  TEST_CASE("malformed csv reports the line") {
    try {
      csv("a,b,1\nb\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(csv("a,b,xyz\n"), ParseError);
    CHECK_THROWS_AS(csv("a,b,1,2\n"), ParseError);
  }

  TEST_CASE("negative weight is a domain error") { CHECK_THROWS_AS(csv("a,b,-1\n"), DomainError); }

  TEST_CASE("matrix market coordinate 3-cycle") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real general\n% comment\n3 3 3\n1 2 1\n2 3 1\n3 1 1\n");
    const auto g = load_edge_list(in, EdgeListFormat::matrix_market);
    const Matrix expected = (Matrix(3, 3) << 0, 1, 0, 0, 0, 1, 1, 0, 0).finished();
    CHECK(g.dense() == expected);
    CHECK(g.labels == std::vector<std::string>{"1", "2", "3"});
  }

  TEST_CASE("matrix market pattern and errors") {
    std::istringstream pattern("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n");
    CHECK(load_edge_list(pattern, EdgeListFormat::matrix_market).dense()(1, 0) == 1.0);
    std::istringstream bad("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
    CHECK_THROWS_AS(load_edge_list(bad, EdgeListFormat::matrix_market), ParseError);
    std::istringstream short_file("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1\n");
    CHECK_THROWS_AS(load_edge_list(short_file, EdgeListFormat::matrix_market), ParseError);
  }

  TEST_CASE("weighted digraph validation") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = std::nan("");
    CHECK_THROWS_AS(WeightedDigraph::from_dense(m), DomainError);
    CHECK_THROWS_AS(WeightedDigraph::from_dense(Matrix::Ones(2, 2), {"a", "a"}), DomainError);
  }

  TEST_CASE("largest_scc of a strongly connected graph is itself") {
    const auto g = dense({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    const auto r = largest_scc(g);
    CHECK(r.graph.dense() == g.dense());
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.index_map[i] == i);
  }

  TEST_CASE("largest_scc drops a dangling sink") {
    const auto g = dense({{0, 1, 0, 1}, {0, 0, 1, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}});
    const auto r = largest_scc(g);
    CHECK(r.graph.size() == 3);
    CHECK_FALSE(r.index_map[3].has_value());
    CHECK(r.graph.labels == std::vector<std::string>{"0", "1", "2"});
  }

  TEST_CASE("largest_scc tie goes to the smallest index") {
    const auto pairs = largest_scc(dense({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}));
    CHECK(pairs.graph.labels == std::vector<std::string>{"0", "1"});

    const auto g = dense({{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}});
    const auto r = largest_scc(g);
    CHECK(r.graph.labels == std::vector<std::string>{"0", "2"});
    CHECK(r.index_map[0] == 0u);
    CHECK(r.index_map[2] == 1u);
    CHECK_FALSE(r.index_map[1].has_value());
  }

  TEST_CASE("largest_scc is idempotent") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Matrix w = Matrix::Zero(15, 15);
      for (Eigen::Index i = 0; i < 15; ++i) {
        for (Eigen::Index j = 0; j < 15; ++j) {
          if (u(rng) < 0.1) w(i, j) = 1.0;
        }
      }
      const auto once = largest_scc(WeightedDigraph::from_dense(w));
      const auto twice = largest_scc(once.graph);
      CHECK(twice.graph.labels == once.graph.labels);
      CHECK(twice.graph.dense() == once.graph.dense());
      CHECK(is_strongly_connected(support_graph(once.graph)));
    }
  }

  TEST_CASE("tarjan matches brute-force mutual reachability") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed + 100);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const Eigen::Index n = 12;
      Matrix w = Matrix::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (u(rng) < 0.12) w(i, j) = 1.0;
        }
      }
      const auto comps = strongly_connected_components(support_graph(w));
      std::vector<std::set<std::size_t>> reach;
      for (Eigen::Index i = 0; i < n; ++i) reach.push_back(oracle::reachable_avoiding(w, static_cast<std::size_t>(i), {}));
      std::size_t total = 0;
      for (const auto& comp : comps) {
        total += comp.size();
        for (auto a : comp) {
          for (auto b : comp) CHECK((reach[a].contains(b) && reach[b].contains(a)));
        }
      }
      CHECK(total == static_cast<std::size_t>(n));
      for (std::size_t c1 = 0; c1 < comps.size(); ++c1) {
        for (std::size_t c2 = c1 + 1; c2 < comps.size(); ++c2) {
          const auto a = comps[c1][0];
          const auto b = comps[c2][0];
          CHECK_FALSE((reach[a].contains(b) && reach[b].contains(a)));
        }
      }
    }
  }

  TEST_CASE("row_normalize examples") {
    const Matrix p2 = row_normalize(dense({{0, 2}, {3, 0}})).matrix();
    CHECK(p2 == (Matrix(2, 2) << 0, 1, 1, 0).finished());
    const Matrix p3 = row_normalize(dense({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}})).matrix();
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) CHECK(p3(i, j) == (i == j ? 0.0 : 0.5));
    }
  }

  TEST_CASE("row_normalize rejects reducible graphs and zero rows") {
    CHECK_THROWS_AS(row_normalize(dense({{0, 1}, {0, 0}})), IrreducibilityError);
    try {
      row_normalize(WeightedDigraph::from_dense(Matrix::Zero(1, 1), {"lonely"}));
      FAIL("expected a domain error");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("lonely") != std::string::npos);
    }
  }

  TEST_CASE("row sums and support are preserved") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Matrix w = oracle::random_irreducible_weights(5 + seed * 3, 0.2, seed) * 1e3;
      const auto p = row_normalize(WeightedDigraph::from_dense(w));
      CHECK((p.matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
      CHECK(((p.matrix().array() > 0.0) == (w.array() > 0.0)).all());
    }
  }

  TEST_CASE("transition matrix invariants are enforced") {
    CHECK_THROWS_AS(TransitionMatrix((Matrix(2, 2) << 0.5, 0.6, 1, 0).finished()), DomainError);
    CHECK_THROWS_AS(TransitionMatrix((Matrix(2, 2) << 1.5, -0.5, 1, 0).finished()), DomainError);
    CHECK_THROWS_AS(TransitionMatrix((Matrix(2, 2) << 1, 0, 0, 1).finished()), IrreducibilityError);
    CHECK_NOTHROW(TransitionMatrix((Matrix(2, 2) << 0, 1, 1, 0).finished()));
  }

  TEST_CASE("induced subgraph keeps labels and weights") {
    const auto g = dense({{0, 2, 3}, {4, 0, 5}, {6, 7, 0}});
    const auto sub = induced_subgraph(g, {0, 2});
    CHECK(sub.labels == std::vector<std::string>{"0", "2"});
    CHECK(sub.dense()(0, 1) == 3.0);
    CHECK(sub.dense()(1, 0) == 6.0);
  }
}
