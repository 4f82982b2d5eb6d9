#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hpmetric/graph.hpp"
#include "hpmetric/types.hpp"

namespace hpm {

/// n_b backbone nodes in a directed chain that splits into C chains of n_c
/// nodes, each returning to the start of the backbone.
struct GluedCyclesSpec {
  std::size_t n_b = 3;
  std::size_t n_c = 4;
  std::size_t branches = 2;
};

// Nodes b1..b{n_b}, then c{m}_{s} branch by branch; unit weights.
WeightedDigraph gen_glued_cycles(const GluedCyclesSpec& spec);

struct ErCycleSpec {
  std::size_t n_er = 20;
  std::size_t n_cycle = 8;
  double p = 0.5;
  double w = 3.0;
  bool er_self_loops = false;
};

// Directed ER(n_er, p) block, a directed n_cycle-cycle, 2 round(n_er p) - 1
// weight-w in-edges per cycle node drawn with replacement from the ER block
// (repeats merged to a single weight-w edge), and a unit bidirectional edge
// er1 <-> cyc1. Retries with seed+1 until strongly connected (100 attempts).
// ER nodes come first.
WeightedDigraph gen_er_cycle(const ErCycleSpec& spec, std::uint64_t seed);

struct PlantedPartitionSpec {
  std::size_t n = 300;
  std::size_t k = 3;
  double p_in = 0.5;
  double p_out = 0.05;

  double delta() const { return p_in - p_out; }
  double rho() const { return (p_in + static_cast<double>(k - 1) * p_out) / static_cast<double>(k); }
  // inverse of (rho, delta) for k communities
  static PlantedPartitionSpec from_rho_delta(std::size_t n, std::size_t k, double rho, double delta);
};

struct PlantedGraph {
  WeightedDigraph graph;
  std::vector<std::size_t> truth;  // community of each node, contiguous balanced blocks
};

// No retries: the caller decides what to do with graphs that are not strongly connected.
PlantedGraph gen_planted_partition(const PlantedPartitionSpec& spec, std::uint64_t seed);

enum class GeometricDomain { flat_torus, torus_with_hole, h_domain, circle, sphere, torus_lattice };

GeometricDomain parse_geometric_domain(const std::string& name);
std::string to_string(GeometricDomain domain);

struct GeometricGraphSpec {
  GeometricDomain domain = GeometricDomain::circle;
  std::size_t n = 1000;
  double gamma = 1.0;
};

struct GeometricGraph {
  WeightedDigraph graph;
  Matrix coords;  // n x dim
  // pairwise ambient distance used for the weights (periodic on the flat tori)
  Matrix distances;
};

// Complete graph with w_ij = exp(-gamma d(x_i, x_j)^2), except the lattice
// (n must be a perfect square, side >= 3), which links the 4 periodic nearest
// neighbours with unit weight.
GeometricGraph gen_geometric(const GeometricGraphSpec& spec, std::uint64_t seed);

// Geometric graph from given points (rows of coords).
GeometricGraph geometric_from_points(GeometricDomain domain, const Matrix& coords, double gamma);

// Random strongly connected digraph: a random Hamiltonian cycle plus each
// ordered pair (self-loops included) with probability `density`, weights uniform in [0.1, 1].
WeightedDigraph gen_random_strongly_connected(std::size_t n, double density, std::uint64_t seed);

/// One bead of a beaded cycle: a junction node followed by parallel chains
/// (lengths may be 0, meaning a direct edge) that all merge into the next junction.
struct Bead {
  std::vector<std::size_t> chain_lengths;
  std::vector<double> chain_weights;  // weight of the junction -> chain edge; defaults to 1
};

// Degenerate by construction: the junctions form one class and every chain of
// length >= 2 in a bead with several alternatives forms its own class.
WeightedDigraph gen_beaded_cycle(const std::vector<Bead>& beads);

// Beaded cycle with random bead/chain counts, lengths and weights.
WeightedDigraph gen_random_beaded_cycle(std::uint64_t seed);

// Four nodes a, b, i, j with edges a->j, a->b, j->b, b->i, b->a, i->a; {a, b}
// is a degenerate class with j between a and b and i between b and a.
WeightedDigraph gen_collapse_gadget(double w_aj = 1.0, double w_ab = 1.0, double w_bi = 1.0, double w_ba = 1.0);

}  // namespace hpm
