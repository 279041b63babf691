#include "lapseg/netmetrics.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <random>
#include <string>
#include <unordered_set>

#include "lapseg/error.hpp"
#include "lapseg/parallel.hpp"
#include "lapseg/random.hpp"

namespace lapseg {
namespace {

std::size_t sorted_intersection(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

UndirectedGraph from_neighbour_lists(std::vector<std::vector<NodeId>> adjacency) {
  UndirectedGraph g;
  std::size_t degree_sum = 0;
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    degree_sum += list.size();
  }
  g.adjacency = std::move(adjacency);
  g.num_edges = degree_sum / 2;
  return g;
}

UndirectedGraph random_skeleton(std::size_t n, std::size_t m, std::uint64_t seed) {
  const std::size_t max_edges = n < 2 ? 0 : n * (n - 1) / 2;
  if (m > max_edges) {
    throw Error(ErrorCode::kParameter, std::to_string(m) + " edges exceed the " +
                                           std::to_string(max_edges) + " possible on " +
                                           std::to_string(n) + " nodes");
  }
  std::mt19937_64 rng(seed);
  // Dense requests sample the missing edges instead.
  const bool complement = m > max_edges / 2;
  const std::size_t draws = complement ? max_edges - m : m;
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(draws * 2);
  std::vector<std::pair<NodeId, NodeId>> order;
  order.reserve(draws);
  while (order.size() < draws) {
    auto a = static_cast<NodeId>(uniform_below(rng, n));
    auto b = static_cast<NodeId>(uniform_below(rng, n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (chosen.insert(static_cast<std::uint64_t>(a) * n + b).second) order.emplace_back(a, b);
  }

  std::vector<std::vector<NodeId>> adjacency(n);
  if (complement) {
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        if (chosen.count(static_cast<std::uint64_t>(a) * n + b) != 0) continue;
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
      }
    }
  } else {
    for (const auto& [a, b] : order) {
      adjacency[a].push_back(b);
      adjacency[b].push_back(a);
    }
  }
  return from_neighbour_lists(std::move(adjacency));
}

}  // namespace

UndirectedGraph symmetrize(const SparseDigraph& graph) {
  const std::size_t n = graph.num_nodes();
  std::vector<std::vector<NodeId>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : graph.out_edges(i)) {
      if (e.target == i) continue;
      adjacency[i].push_back(e.target);
      adjacency[e.target].push_back(static_cast<NodeId>(i));
    }
  }
  return from_neighbour_lists(std::move(adjacency));
}

double clustering_coefficient(const UndirectedGraph& graph) {
  const std::size_t n = graph.num_nodes();
  if (n == 0) return 0.0;
  std::vector<double> local(n, 0.0);
  parallel_for(n, 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const auto& nbrs = graph.adjacency[v];
      const std::size_t d = nbrs.size();
      if (d < 2) continue;
      std::size_t links = 0;  // each triangle through v is seen twice
      for (NodeId u : nbrs) links += sorted_intersection(nbrs, graph.adjacency[u]);
      local[v] = static_cast<double>(links) / static_cast<double>(d * (d - 1));
    }
  });
  double sum = 0.0;
  for (double c : local) sum += c;
  return sum / static_cast<double>(n);
}

double clustering_coefficient(const SparseDigraph& graph) {
  return clustering_coefficient(symmetrize(graph));
}

double efficiency(const UndirectedGraph& graph) {
  const std::size_t n = graph.num_nodes();
  if (n < 2) {
    throw Error(ErrorCode::kUndefinedMetric,
                "efficiency needs at least 2 nodes, got " + std::to_string(n));
  }
  // Breadth-first search from 64 sources at once, one bit per source. Pair
  // counts per hop distance are integers, so the result does not depend on
  // how batches are scheduled.
  const std::size_t batches = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> histograms(batches);
  parallel_for(batches, 1, [&](std::size_t b0, std::size_t b1) {
    std::vector<std::uint64_t> visited(n), frontier(n), next(n);
    for (std::size_t b = b0; b < b1; ++b) {
      std::fill(visited.begin(), visited.end(), 0);
      std::fill(frontier.begin(), frontier.end(), 0);
      const std::size_t first = b * 64;
      const std::size_t count = std::min<std::size_t>(64, n - first);
      const std::uint64_t all = count == 64 ? ~0ULL : (1ULL << count) - 1;
      for (std::size_t s = 0; s < count; ++s) {
        visited[first + s] |= 1ULL << s;
        frontier[first + s] |= 1ULL << s;
      }
      auto& hist = histograms[b];
      hist.assign(1, 0);
      while (true) {
        std::uint64_t reached = 0;
        for (std::size_t v = 0; v < n; ++v) {
          std::uint64_t bits = 0;
          if (visited[v] != all) {
            for (NodeId u : graph.adjacency[v]) bits |= frontier[u];
            bits &= ~visited[v];
          }
          next[v] = bits;
          reached += static_cast<std::uint64_t>(std::popcount(bits));
        }
        if (reached == 0) break;
        hist.push_back(reached);
        for (std::size_t v = 0; v < n; ++v) visited[v] |= next[v];
        frontier.swap(next);
      }
    }
  });
  std::vector<std::uint64_t> total;
  for (const auto& hist : histograms) {
    if (hist.size() > total.size()) total.resize(hist.size(), 0);
    for (std::size_t d = 1; d < hist.size(); ++d) total[d] += hist[d];
  }
  double sum = 0.0;
  for (std::size_t d = 1; d < total.size(); ++d) {
    sum += static_cast<double>(total[d]) / static_cast<double>(d);
  }
  return sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double efficiency(const SparseDigraph& graph) { return efficiency(symmetrize(graph)); }

SparseDigraph random_equivalent(std::size_t n, std::size_t m, std::uint64_t seed) {
  const UndirectedGraph g = random_skeleton(n, m, seed);
  std::vector<std::vector<Edge>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : g.adjacency[i]) adjacency[i].push_back({j, 1.0});
  }
  return SparseDigraph(adjacency);
}

NetworkStats small_world_ness(const SparseDigraph& graph, std::size_t samples,
                              std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::kParameter, "baseline samples must be >= 1");
  const UndirectedGraph skeleton = symmetrize(graph);
  NetworkStats stats;
  stats.nodes = skeleton.num_nodes();
  stats.edges = skeleton.num_edges;
  stats.clustering = clustering_coefficient(skeleton);
  stats.efficiency = efficiency(skeleton);
  stats.baseline_samples = samples;

  double c_sum = 0.0;
  double e_sum = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const UndirectedGraph baseline =
        random_skeleton(stats.nodes, stats.edges, derive_seed(seed, s));
    c_sum += clustering_coefficient(baseline);
    e_sum += efficiency(baseline);
  }
  stats.c_rand = c_sum / static_cast<double>(samples);
  stats.e_rand = e_sum / static_cast<double>(samples);
  if (stats.c_rand == 0.0 || stats.e_rand == 0.0) {
    stats.swn_infinite = true;
    stats.swn = std::numeric_limits<double>::infinity();
  } else {
    stats.swn = (stats.clustering / stats.c_rand) * (stats.efficiency / stats.e_rand);
  }
  return stats;
}

}  // namespace lapseg
