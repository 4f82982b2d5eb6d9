#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "hpmetric/types.hpp"

namespace hpm {

// Largest state space for which a dense transition matrix is materialized.
inline constexpr std::size_t kMaxDenseStates = 12000;

/// Sparse nonnegative edge weights; weights(i, j) is the weight of edge i -> j.
struct WeightedDigraph {
  std::vector<std::string> labels;
  SparseMatrix weights;

  std::size_t size() const { return labels.size(); }
  Matrix dense() const { return Matrix(weights); }

  // Labels default to "0", "1", ... when empty. Zero entries are dropped.
  static WeightedDigraph from_dense(const Matrix& weights, std::vector<std::string> labels = {});
  static WeightedDigraph from_triplets(std::size_t n, const std::vector<Eigen::Triplet<double>>& edges,
                                       std::vector<std::string> labels = {});
};

// Throws DomainError on negative/non-finite weights or duplicate labels.
void validate(const WeightedDigraph& g);

/// Irreducible row-stochastic matrix. Construction validates every invariant.
class TransitionMatrix {
 public:
  TransitionMatrix(Matrix p, std::vector<std::string> labels = {});

  const Matrix& matrix() const { return p_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return p_(i, j); }

 private:
  Matrix p_;
  std::vector<std::string> labels_;
};

enum class EdgeListFormat { csv, matrix_market };

WeightedDigraph load_edge_list(std::istream& in, EdgeListFormat format);

using Adjacency = std::vector<std::vector<std::size_t>>;

Adjacency support_graph(const WeightedDigraph& g);
Adjacency support_graph(const Matrix& m);
Adjacency reverse(const Adjacency& adj);

// Iterative Tarjan. Components come out in reverse topological order of the
// condensation; members of each component are sorted ascending.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Adjacency& adj);
bool is_strongly_connected(const Adjacency& adj);

struct SccRestriction {
  WeightedDigraph graph;
  // old index -> new index, empty for dropped nodes
  std::vector<std::optional<std::size_t>> index_map;
};

// Largest component by node count; ties go to the component holding the smallest index.
SccRestriction largest_scc(const WeightedDigraph& g);

WeightedDigraph induced_subgraph(const WeightedDigraph& g, const std::vector<std::size_t>& nodes);

TransitionMatrix row_normalize(const WeightedDigraph& g);

}  // namespace hpm
