#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpmetric/graph.hpp"
#include "hpmetric/types.hpp"

namespace hpm {

struct PcaResult {
  Matrix coords;             // n x dims; components beyond the rank are zero
  Vector explained;          // fraction of total variance per returned component
  std::size_t rank = 0;      // numerical rank of the centered matrix
  bool rank_deficient = false;  // dims > rank
};

// Rows are observations. Columns are mean-centered, components come from a
// thin SVD and each loading vector is flipped so its largest-magnitude entry
// is positive.
PcaResult pca_embed(const Matrix& m, std::size_t dims);

struct KMeansResult {
  std::vector<std::size_t> labels;
  Matrix centers;
  double inertia = 0.0;
};

// k-means++ seeding, Lloyd iterations, best of `restarts` by inertia. An empty
// cluster is reseeded with the point farthest from its current center.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::size_t restarts, std::uint64_t seed);

struct KMedoidsResult {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> medoids;
  double cost = 0.0;
};

// Alternating PAM on a precomputed distance matrix: assign to the nearest
// medoid, move each medoid to the member with the least total distance.
KMedoidsResult kmedoids(const Matrix& d, std::size_t k, std::size_t restarts, std::uint64_t seed);

// Best agreement over one-to-one matchings of cluster ids to truth ids.
// Up to 16 distinct ids on either side.
double purity_accuracy(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& truth);

// (1 + #{uniform random labelings with purity >= accuracy}) / (trials + 1).
double empirical_p_value(double accuracy, const std::vector<std::size_t>& truth, std::size_t k, std::size_t trials,
                         std::uint64_t seed);
// Same with balanced contiguous truth blocks of size n/k.
double empirical_p_value(double accuracy, std::size_t n, std::size_t k, std::size_t trials, std::uint64_t seed);

std::vector<std::size_t> balanced_truth(std::size_t n, std::size_t k);

enum class ClusterMethod { kmedoids_d12, pca_kmeans_d12, pca_kmeans_a };

ClusterMethod parse_cluster_method(const std::string& name);
std::string to_string(ClusterMethod method);

struct ClusteringResult {
  std::vector<std::size_t> labels;
  std::optional<double> accuracy;
  std::optional<double> p_value;
};

struct ClusterOptions {
  std::size_t k = 3;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  // PCA methods: embedding dimension, k - 1 when unset
  std::optional<std::size_t> dims;
};

// Clusters the nodes of a strongly connected graph. The A method embeds the
// weight matrix itself, the d12 methods use d^{1/2} of the row-normalized chain.
std::vector<std::size_t> cluster_graph(const WeightedDigraph& g, ClusterMethod method, const ClusterOptions& options);

}  // namespace hpm
