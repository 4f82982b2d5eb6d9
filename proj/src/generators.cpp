#include "hpmetric/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include "hpmetric/errors.hpp"

namespace hpm {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxErAttempts = 100;

void add_edge(Triplets& edges, std::size_t from, std::size_t to, double w) {
  edges.emplace_back(static_cast<int>(from), static_cast<int>(to), w);
}

double periodic_gap(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

std::size_t coordinate_dim(GeometricDomain domain) {
  switch (domain) {
    case GeometricDomain::sphere:
      return 3;
    default:
      return 2;
  }
}

double domain_distance(GeometricDomain domain, const Matrix& x, Eigen::Index i, Eigen::Index j) {
  switch (domain) {
    case GeometricDomain::flat_torus:
    case GeometricDomain::torus_with_hole:
    case GeometricDomain::torus_lattice: {
      const double dx = periodic_gap(x(i, 0), x(j, 0), kTwoPi);
      const double dy = periodic_gap(x(i, 1), x(j, 1), kTwoPi);
      return std::hypot(dx, dy);
    }
    default:
      return (x.row(i) - x.row(j)).norm();
  }
}

bool in_domain(GeometricDomain domain, double x, double y) {
  switch (domain) {
    case GeometricDomain::torus_with_hole:
      return std::hypot(x - std::numbers::pi, y - std::numbers::pi) >= std::numbers::pi / 2.0;
    case GeometricDomain::h_domain:
      return std::abs(x - std::numbers::pi) >= std::numbers::pi / 2.0 ||
             std::abs(y - std::numbers::pi) <= std::numbers::pi / 4.0;
    default:
      return true;
  }
}

}  // namespace

WeightedDigraph gen_glued_cycles(const GluedCyclesSpec& spec) {
  if (spec.n_b < 1 || spec.n_c < 1 || spec.branches < 1) {
    throw DomainError("glued cycles need n_b, n_c, C >= 1");
  }
  const std::size_t n = spec.n_b + spec.branches * spec.n_c;
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t t = 1; t <= spec.n_b; ++t) labels.push_back("b" + std::to_string(t));
  for (std::size_t m = 1; m <= spec.branches; ++m) {
    for (std::size_t s = 1; s <= spec.n_c; ++s) labels.push_back("c" + std::to_string(m) + "_" + std::to_string(s));
  }
  Triplets edges;
  for (std::size_t t = 0; t + 1 < spec.n_b; ++t) add_edge(edges, t, t + 1, 1.0);
  for (std::size_t m = 0; m < spec.branches; ++m) {
    const std::size_t first = spec.n_b + m * spec.n_c;
    add_edge(edges, spec.n_b - 1, first, 1.0);
    for (std::size_t s = 0; s + 1 < spec.n_c; ++s) add_edge(edges, first + s, first + s + 1, 1.0);
    add_edge(edges, first + spec.n_c - 1, 0, 1.0);
  }
  return WeightedDigraph::from_triplets(n, edges, std::move(labels));
}

WeightedDigraph gen_er_cycle(const ErCycleSpec& spec, std::uint64_t seed) {
  if (spec.n_er < 1 || spec.n_cycle < 1 || !(spec.p > 0.0 && spec.p <= 1.0) || !(spec.w > 0.0)) {
    throw DomainError("ER+cycle needs n_er, n_cycle >= 1, p in (0, 1] and w > 0");
  }
  const std::size_t n = spec.n_er + spec.n_cycle;
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= spec.n_er; ++i) labels.push_back("er" + std::to_string(i));
  for (std::size_t i = 1; i <= spec.n_cycle; ++i) labels.push_back("cyc" + std::to_string(i));
  const long draws = 2 * std::lround(static_cast<double>(spec.n_er) * spec.p) - 1;

  for (int attempt = 0; attempt < kMaxErAttempts; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_er(0, spec.n_er - 1);
    std::map<std::pair<std::size_t, std::size_t>, double> weights;
    for (std::size_t i = 0; i < spec.n_er; ++i) {
      for (std::size_t j = 0; j < spec.n_er; ++j) {
        if (i == j && !spec.er_self_loops) continue;
        if (unit(rng) < spec.p) weights[{i, j}] = 1.0;
      }
    }
    for (std::size_t t = 0; t < spec.n_cycle; ++t) {
      weights[{spec.n_er + t, spec.n_er + (t + 1) % spec.n_cycle}] = 1.0;
    }
    for (std::size_t t = 0; t < spec.n_cycle; ++t) {
      for (long d = 0; d < draws; ++d) weights[{pick_er(rng), spec.n_er + t}] = spec.w;
    }
    weights[{spec.n_er, 0}] += 1.0;
    weights[{0, spec.n_er}] += 1.0;

    Triplets edges;
    for (const auto& [ij, w] : weights) add_edge(edges, ij.first, ij.second, w);
    auto g = WeightedDigraph::from_triplets(n, edges, labels);
    if (is_strongly_connected(support_graph(g))) return g;
  }
  throw GenerationError("ER+cycle graph was not strongly connected after 100 attempts");
}

PlantedPartitionSpec PlantedPartitionSpec::from_rho_delta(std::size_t n, std::size_t k, double rho, double delta) {
  PlantedPartitionSpec spec;
  spec.n = n;
  spec.k = k;
  const double kd = static_cast<double>(k);
  spec.p_out = rho - delta / kd;
  spec.p_in = spec.p_out + delta;
  return spec;
}

PlantedGraph gen_planted_partition(const PlantedPartitionSpec& spec, std::uint64_t seed) {
  if (spec.k < 1 || spec.n % spec.k != 0) throw DomainError("planted partition needs n divisible by k");
  if (!(spec.p_out >= 0.0 && spec.p_out < spec.p_in && spec.p_in <= 1.0)) {
    // p_in = p_out = 1 is allowed as the complete graph
    if (!(spec.p_in == 1.0 && spec.p_out == 1.0)) throw DomainError("planted partition needs 0 <= p_out < p_in <= 1");
  }
  const std::size_t block = spec.n / spec.k;
  PlantedGraph out;
  out.truth.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) out.truth[i] = i / block;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Triplets edges;
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      if (i == j) continue;
      const double prob = out.truth[i] == out.truth[j] ? spec.p_in : spec.p_out;
      if (unit(rng) < prob) add_edge(edges, i, j, 1.0);
    }
  }
  out.graph = WeightedDigraph::from_triplets(spec.n, edges);
  return out;
}

GeometricDomain parse_geometric_domain(const std::string& name) {
  if (name == "flat-torus") return GeometricDomain::flat_torus;
  if (name == "torus-with-hole") return GeometricDomain::torus_with_hole;
  if (name == "H-domain" || name == "h-domain") return GeometricDomain::h_domain;
  if (name == "circle") return GeometricDomain::circle;
  if (name == "sphere") return GeometricDomain::sphere;
  if (name == "torus-lattice") return GeometricDomain::torus_lattice;
  throw UsageError("unknown geometric domain '" + name + "'");
}

std::string to_string(GeometricDomain domain) {
  switch (domain) {
    case GeometricDomain::flat_torus:
      return "flat-torus";
    case GeometricDomain::torus_with_hole:
      return "torus-with-hole";
    case GeometricDomain::h_domain:
      return "H-domain";
    case GeometricDomain::circle:
      return "circle";
    case GeometricDomain::sphere:
      return "sphere";
    case GeometricDomain::torus_lattice:
      return "torus-lattice";
  }
  return "unknown";
}

GeometricGraph geometric_from_points(GeometricDomain domain, const Matrix& coords, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  const auto n = coords.rows();
  GeometricGraph out;
  out.coords = coords;
  out.distances = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out.distances(i, j) = out.distances(j, i) = domain_distance(domain, coords, i, j);
    }
  }
  Matrix w = (-gamma * out.distances.array().square()).exp().matrix();
  w.diagonal().setZero();
  out.graph = WeightedDigraph::from_dense(w);
  return out;
}

GeometricGraph gen_geometric(const GeometricGraphSpec& spec, std::uint64_t seed) {
  if (!(spec.gamma > 0.0)) throw DomainError("gamma must be positive");
  if (spec.n < 2) throw DomainError("geometric graph needs at least two points");
  const auto n = static_cast<Eigen::Index>(spec.n);

  if (spec.domain == GeometricDomain::torus_lattice) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(spec.n))));
    if (side * side != spec.n || side < 3) throw DomainError("torus lattice needs n = m^2 with m >= 3");
    GeometricGraph out;
    out.coords.resize(n, 2);
    Triplets edges;
    auto id = [side](std::size_t r, std::size_t c) { return (r % side) * side + (c % side); };
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        const auto v = static_cast<Eigen::Index>(id(r, c));
        out.coords(v, 0) = kTwoPi * static_cast<double>(c) / static_cast<double>(side);
        out.coords(v, 1) = kTwoPi * static_cast<double>(r) / static_cast<double>(side);
        add_edge(edges, id(r, c), id(r, c + 1), 1.0);
        add_edge(edges, id(r, c), id(r, c + side - 1), 1.0);
        add_edge(edges, id(r, c), id(r + 1, c), 1.0);
        add_edge(edges, id(r, c), id(r + side - 1, c), 1.0);
      }
    }
    out.distances = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) out.distances(i, j) = domain_distance(spec.domain, out.coords, i, j);
    }
    out.graph = WeightedDigraph::from_triplets(spec.n, edges);
    return out;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix coords(n, static_cast<Eigen::Index>(coordinate_dim(spec.domain)));
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (spec.domain) {
      case GeometricDomain::circle: {
        const double angle = kTwoPi * unit(rng);
        coords(i, 0) = std::cos(angle);
        coords(i, 1) = std::sin(angle);
        break;
      }
      case GeometricDomain::sphere: {
        Eigen::Vector3d v;
        do {
          v = {normal(rng), normal(rng), normal(rng)};
        } while (v.norm() < 1e-12);
        coords.row(i) = v.normalized().transpose();
        break;
      }
      default: {
        double x = 0.0, y = 0.0;
        do {
          x = kTwoPi * unit(rng);
          y = kTwoPi * unit(rng);
        } while (!in_domain(spec.domain, x, y));
        coords(i, 0) = x;
        coords(i, 1) = y;
        break;
      }
    }
  }
  return geometric_from_points(spec.domain, coords, spec.gamma);
}

WeightedDigraph gen_random_strongly_connected(std::size_t n, double density, std::uint64_t seed) {
  if (n < 1) throw DomainError("graph needs at least one node");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    w(static_cast<Eigen::Index>(order[k]), static_cast<Eigen::Index>(order[(k + 1) % n])) = weight(rng);
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (unit(rng) < density) w(i, j) = weight(rng);
    }
  }
  return WeightedDigraph::from_dense(w);
}

WeightedDigraph gen_beaded_cycle(const std::vector<Bead>& beads) {
  if (beads.empty()) throw DomainError("beaded cycle needs at least one bead");
  std::vector<std::string> labels;
  std::vector<std::size_t> junction(beads.size());
  for (std::size_t b = 0; b < beads.size(); ++b) {
    junction[b] = labels.size();
    labels.push_back("j" + std::to_string(b + 1));
    if (beads[b].chain_lengths.empty()) throw DomainError("every bead needs at least one chain");
    for (std::size_t c = 0; c < beads[b].chain_lengths.size(); ++c) {
      for (std::size_t s = 0; s < beads[b].chain_lengths[c]; ++s) {
        labels.push_back("j" + std::to_string(b + 1) + "c" + std::to_string(c + 1) + "_" + std::to_string(s + 1));
      }
    }
  }
  Triplets edges;
  std::size_t next_id = 0;
  for (std::size_t b = 0; b < beads.size(); ++b) {
    ++next_id;  // the junction itself
    const std::size_t target = junction[(b + 1) % beads.size()];
    const auto& bead = beads[b];
    for (std::size_t c = 0; c < bead.chain_lengths.size(); ++c) {
      const double w = c < bead.chain_weights.size() ? bead.chain_weights[c] : 1.0;
      const std::size_t len = bead.chain_lengths[c];
      if (len == 0) {
        add_edge(edges, junction[b], target, w);
        continue;
      }
      add_edge(edges, junction[b], next_id, w);
      for (std::size_t s = 0; s + 1 < len; ++s) add_edge(edges, next_id + s, next_id + s + 1, 1.0);
      add_edge(edges, next_id + len - 1, target, 1.0);
      next_id += len;
    }
  }
  const std::size_t n = labels.size();
  return WeightedDigraph::from_triplets(n, edges, std::move(labels));
}

WeightedDigraph gen_random_beaded_cycle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> bead_count(2, 4);
  std::uniform_int_distribution<std::size_t> chain_count(2, 3);
  std::uniform_int_distribution<std::size_t> chain_length(0, 4);
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  std::vector<Bead> beads(bead_count(rng));
  for (auto& bead : beads) {
    const auto chains = chain_count(rng);
    for (std::size_t c = 0; c < chains; ++c) {
      // at most one direct edge per bead keeps the graph simple
      std::size_t len = chain_length(rng);
      if (len == 0 && std::find(bead.chain_lengths.begin(), bead.chain_lengths.end(), 0) != bead.chain_lengths.end()) {
        len = 2;
      }
      bead.chain_lengths.push_back(len);
      bead.chain_weights.push_back(weight(rng));
    }
  }
  // guarantee a second non-singleton class besides the junctions
  beads.front().chain_lengths.front() = std::max<std::size_t>(beads.front().chain_lengths.front(), 2);
  return gen_beaded_cycle(beads);
}

WeightedDigraph gen_collapse_gadget(double w_aj, double w_ab, double w_bi, double w_ba) {
  // a=0, b=1, i=2, j=3
  Triplets edges;
  add_edge(edges, 0, 3, w_aj);
  add_edge(edges, 0, 1, w_ab);
  add_edge(edges, 3, 1, 1.0);
  add_edge(edges, 1, 2, w_bi);
  add_edge(edges, 1, 0, w_ba);
  add_edge(edges, 2, 0, 1.0);
  return WeightedDigraph::from_triplets(4, edges, {"a", "b", "i", "j"});
}

}  // namespace hpm
