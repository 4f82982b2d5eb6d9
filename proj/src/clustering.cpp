#include "hpmetric/clustering.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hpmetric/errors.hpp"
#include "hpmetric/hitting.hpp"
#include "hpmetric/metric.hpp"
#include "hpmetric/stationary.hpp"

namespace hpm {

namespace {

constexpr int kMaxLloydIterations = 300;
constexpr int kMaxPamIterations = 100;
constexpr std::size_t kMaxPurityLabels = 16;

// Distinct sampling of k indices out of n.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(k);
  return all;
}

Matrix kmeanspp_seed(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
  const auto n = x.rows();
  Matrix centers(static_cast<Eigen::Index>(k), x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  Vector dist2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist2(i);
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);
    }
    centers.row(static_cast<Eigen::Index>(c)) = x.row(chosen);
    dist2 = dist2.cwiseMin((x.rowwise() - x.row(chosen)).rowwise().squaredNorm());
  }
  return centers;
}

KMeansResult lloyd(const Matrix& x, Matrix centers) {
  const auto n = x.rows();
  const auto k = centers.rows();
  KMeansResult out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  Vector dist2(n);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = iter == 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist2(i) = best_d;
      if (out.labels[static_cast<std::size_t>(i)] != static_cast<std::size_t>(best)) changed = true;
      out.labels[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
    }
    if (!changed) break;

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(out.labels[static_cast<std::size_t>(i)])) += x.row(i);
      ++counts[out.labels[static_cast<std::size_t>(i)]];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // empty cluster: take over the worst-served point
      Eigen::Index far = 0;
      dist2.maxCoeff(&far);
      centers.row(c) = x.row(far);
      out.labels[static_cast<std::size_t>(far)] = static_cast<std::size_t>(c);
      dist2(far) = 0.0;
    }
  }
  out.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.inertia += (x.row(i) - centers.row(static_cast<Eigen::Index>(out.labels[static_cast<std::size_t>(i)]))).squaredNorm();
  }
  out.centers = std::move(centers);
  return out;
}

KMedoidsResult pam(const Matrix& d, std::vector<std::size_t> medoids) {
  const auto n = static_cast<std::size_t>(d.rows());
  const std::size_t k = medoids.size();
  KMedoidsResult out;
  out.labels.assign(n, 0);
  auto assign = [&] {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double v = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(medoids[c]));
        if (v < best_d || (v == best_d && i == medoids[c])) {
          best_d = v;
          best = c;
        }
      }
      out.labels[i] = best;
      cost += best_d;
    }
    return cost;
  };
  double cost = assign();
  for (int iter = 0; iter < kMaxPamIterations; ++iter) {
    bool moved = false;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t best = medoids[c];
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t cand = 0; cand < n; ++cand) {
        if (out.labels[cand] != c) continue;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (out.labels[i] == c) total += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cand));
        }
        if (total < best_cost - 1e-15 * std::max(1.0, std::abs(total))) {
          best_cost = total;
          best = cand;
        }
      }
      if (best != medoids[c]) {
        // keep the current medoid on ties
        double current = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (out.labels[i] == c) current += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(medoids[c]));
        }
        if (best_cost < current) {
          medoids[c] = best;
          moved = true;
        }
      }
    }
    if (!moved) break;
    const double next = assign();
    if (next >= cost) {
      cost = next;
      break;
    }
    cost = next;
  }
  out.cost = assign();
  out.medoids = std::move(medoids);
  return out;
}

std::size_t distinct_count(const std::vector<std::size_t>& v) {
  if (v.empty()) return 0;
  return *std::max_element(v.begin(), v.end()) + 1;
}

Matrix d_half(const WeightedDigraph& g, unsigned threads) {
  const auto p = row_normalize(g);
  const auto phi = stationary_distribution(p);
  HittingOptions options;
  options.threads = threads;
  const auto q = hitting_fast(p, options);
  return hp_distance(hp_similarity(q, phi, 0.5)).d;
}

}  // namespace

PcaResult pca_embed(const Matrix& m, std::size_t dims) {
  if (dims == 0 || dims > static_cast<std::size_t>(m.rows())) throw UsageError("PCA dims must be in [1, n]");
  if (!m.allFinite()) throw DomainError("PCA input contains non-finite values");
  const Matrix centered = m.rowwise() - m.colwise().mean();
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = smax * static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon();

  PcaResult out;
  out.rank = 0;
  for (Eigen::Index c = 0; c < s.size(); ++c) {
    if (s(c) > cutoff && s(c) > 0.0) ++out.rank;
  }
  const double total = s.squaredNorm();
  const auto d = static_cast<Eigen::Index>(dims);
  out.coords = Matrix::Zero(m.rows(), d);
  out.explained = Vector::Zero(d);
  out.rank_deficient = dims > out.rank;
  for (Eigen::Index c = 0; c < d && c < static_cast<Eigen::Index>(out.rank); ++c) {
    Vector loading = svd.matrixV().col(c);
    Eigen::Index arg = 0;
    loading.cwiseAbs().maxCoeff(&arg);
    const double sign = loading(arg) < 0.0 ? -1.0 : 1.0;
    out.coords.col(c) = sign * s(c) * svd.matrixU().col(c);
    out.explained(c) = s(c) * s(c) / total;
  }
  return out;
}

KMeansResult kmeans(const Matrix& points, std::size_t k, std::size_t restarts, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k == 0 || k > n) throw UsageError("k-means needs 1 <= k <= n");
  if (!points.allFinite()) throw DomainError("k-means input contains non-finite values");
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    auto run = lloyd(points, kmeanspp_seed(points, k, rng));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

KMedoidsResult kmedoids(const Matrix& d, std::size_t k, std::size_t restarts, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(d.rows());
  if (d.rows() != d.cols()) throw UsageError("k-medoids needs a square distance matrix");
  if (k == 0 || k > n) throw UsageError("k-medoids needs 1 <= k <= n");
  std::mt19937_64 rng(seed);
  KMedoidsResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    auto run = pam(d, sample_indices(n, k, rng));
    if (run.cost < best.cost) best = std::move(run);
  }
  return best;
}

double purity_accuracy(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& truth) {
  if (labels.size() != truth.size()) throw UsageError("labels and truth differ in length");
  if (labels.empty()) return 1.0;
  const std::size_t m = std::max(distinct_count(labels), distinct_count(truth));
  if (m > kMaxPurityLabels) throw UsageError("purity supports at most 16 distinct labels");
  std::vector<std::vector<std::size_t>> table(m, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) ++table[labels[i]][truth[i]];

  // assignment by DP over subsets of truth ids; row = popcount(mask)
  std::vector<long long> dp(std::size_t{1} << m, -1);
  dp[0] = 0;
  for (std::size_t mask = 0; mask < dp.size(); ++mask) {
    if (dp[mask] < 0) continue;
    const auto row = static_cast<std::size_t>(std::popcount(mask));
    if (row == m) continue;
    for (std::size_t t = 0; t < m; ++t) {
      if (mask & (std::size_t{1} << t)) continue;
      const auto next = mask | (std::size_t{1} << t);
      dp[next] = std::max(dp[next], dp[mask] + static_cast<long long>(table[row][t]));
    }
  }
  return static_cast<double>(dp.back()) / static_cast<double>(labels.size());
}

std::vector<std::size_t> balanced_truth(std::size_t n, std::size_t k) {
  if (k == 0 || n % k != 0) throw DomainError("balanced truth needs n divisible by k");
  std::vector<std::size_t> truth(n);
  for (std::size_t i = 0; i < n; ++i) truth[i] = i / (n / k);
  return truth;
}

double empirical_p_value(double accuracy, const std::vector<std::size_t>& truth, std::size_t k, std::size_t trials,
                         std::uint64_t seed) {
  if (trials == 0) throw UsageError("p-value needs at least one trial");
  if (k == 0) throw UsageError("p-value needs k >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::vector<std::size_t> random_labels(truth.size());
  std::size_t at_least = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& l : random_labels) l = pick(rng);
    if (purity_accuracy(random_labels, truth) >= accuracy) ++at_least;
  }
  return static_cast<double>(at_least + 1) / static_cast<double>(trials + 1);
}

double empirical_p_value(double accuracy, std::size_t n, std::size_t k, std::size_t trials, std::uint64_t seed) {
  return empirical_p_value(accuracy, balanced_truth(n, k), k, trials, seed);
}

ClusterMethod parse_cluster_method(const std::string& name) {
  if (name == "kmedoids-d12") return ClusterMethod::kmedoids_d12;
  if (name == "pca-kmeans-d12") return ClusterMethod::pca_kmeans_d12;
  if (name == "pca-kmeans-A") return ClusterMethod::pca_kmeans_a;
  throw UsageError("unknown clustering method '" + name + "'");
}

std::string to_string(ClusterMethod method) {
  switch (method) {
    case ClusterMethod::kmedoids_d12:
      return "kmedoids-d12";
    case ClusterMethod::pca_kmeans_d12:
      return "pca-kmeans-d12";
    case ClusterMethod::pca_kmeans_a:
      return "pca-kmeans-A";
  }
  return "unknown";
}

std::vector<std::size_t> cluster_graph(const WeightedDigraph& g, ClusterMethod method, const ClusterOptions& options) {
  const std::size_t k = options.k;
  if (k == 0 || k > g.size()) throw UsageError("cluster count must be in [1, n]");
  const std::size_t dims = options.dims.value_or(std::max<std::size_t>(k - 1, 1));
  switch (method) {
    case ClusterMethod::kmedoids_d12:
      return kmedoids(d_half(g, options.threads), k, options.restarts, options.seed).labels;
    case ClusterMethod::pca_kmeans_d12:
      return kmeans(pca_embed(d_half(g, options.threads), dims).coords, k, options.restarts, options.seed).labels;
    case ClusterMethod::pca_kmeans_a:
      return kmeans(pca_embed(g.dense(), dims).coords, k, options.restarts, options.seed).labels;
  }
  throw UsageError("unknown clustering method");
}

}  // namespace hpm
