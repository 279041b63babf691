#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lapseg/graph.hpp"

namespace lapseg {

/// Simple undirected skeleton: sorted, duplicate-free neighbour lists.
struct UndirectedGraph {
  std::vector<std::vector<NodeId>> adjacency;
  std::size_t num_edges = 0;

  std::size_t num_nodes() const { return adjacency.size(); }
};

// Edge {i, j} exists iff i -> j or j -> i exists; weights are dropped.
UndirectedGraph symmetrize(const SparseDigraph& graph);

// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
double clustering_coefficient(const UndirectedGraph& graph);
double clustering_coefficient(const SparseDigraph& graph);

// (1 / (n (n - 1))) * sum over ordered pairs of 1 / hops, unreachable pairs
// contributing 0. Throws kUndefinedMetric for n < 2.
double efficiency(const UndirectedGraph& graph);
double efficiency(const SparseDigraph& graph);

// Uniform G(n, m) graph stored with both edge directions (weight 1).
SparseDigraph random_equivalent(std::size_t n, std::size_t m, std::uint64_t seed);

struct NetworkStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;  // undirected edges of the skeleton
  double clustering = 0.0;
  double efficiency = 0.0;
  double c_rand = 0.0;
  double e_rand = 0.0;
  double swn = 0.0;
  bool swn_infinite = false;  // c_rand or e_rand was zero
  std::size_t baseline_samples = 0;
};

// C and E of the skeleton against the means over `samples` G(n, m) graphs,
// S^E = (C / C_rand) (E / E_rand).
NetworkStats small_world_ness(const SparseDigraph& graph, std::size_t samples,
                              std::uint64_t seed);

}  // namespace lapseg
