#include <doctest.h>

#include <numeric>
#include <random>

#include "../support/oracles.hpp"
#include "lapseg/error.hpp"
#include "lapseg/netmetrics.hpp"

using namespace lapseg;

namespace {

SparseDigraph undirected(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  std::vector<std::vector<Edge>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back({b, 1.0});
    adj[b].push_back({a, 1.0});
  }
  return SparseDigraph(adj);
}

SparseDigraph complete(std::size_t n) {
  std::vector<std::vector<Edge>> adj(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i != j) adj[i].push_back({j, 1.0});
    }
  }
  return SparseDigraph(adj);
}

SparseDigraph relabel(const SparseDigraph& g, const std::vector<NodeId>& perm) {
  std::vector<std::vector<Edge>> adj(g.num_nodes());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    for (const Edge& e : g.out_edges(i)) adj[perm[i]].push_back({perm[e.target], e.weight});
  }
  return SparseDigraph(adj);
}

}  // namespace

TEST_CASE("hand-computed metrics") {
  CHECK(clustering_coefficient(undirected(3, {{0, 1}, {1, 2}, {0, 2}})) == 1.0);
  CHECK(clustering_coefficient(undirected(3, {{0, 1}, {1, 2}})) == 0.0);
  CHECK(clustering_coefficient(undirected(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}})) ==
        doctest::Approx(5.0 / 6.0));
  CHECK(efficiency(complete(6)) == 1.0);
  CHECK(efficiency(undirected(3, {{0, 1}, {1, 2}})) == doctest::Approx(5.0 / 6.0));
  CHECK(efficiency(undirected(3, {{0, 1}})) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(efficiency(SparseDigraph(1)), Error);
}

TEST_CASE("symmetrization ignores direction and weight") {
  std::vector<std::vector<Edge>> adj(3);
  adj[0] = {{1, 0.2}};
  adj[1] = {{0, 0.9}, {2, 0.5}};
  const UndirectedGraph u = symmetrize(SparseDigraph(adj));
  CHECK(u.num_edges == 2);
  CHECK(u.adjacency[2] == std::vector<NodeId>{1});
}

TEST_CASE("metrics agree with brute force on random graphs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    const double p = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    const SparseDigraph g = oracle::random_digraph(n, p, rng);
    const auto m = oracle::skeleton_matrix(g);
    CHECK(std::abs(clustering_coefficient(g) - oracle::brute_clustering(m)) <= 1e-12);
    CHECK(std::abs(efficiency(g) - oracle::floyd_warshall_efficiency(m)) <= 1e-12);
  }
}

TEST_CASE("efficiency over many bit batches") {
  // 130 nodes spans three 64-source batches.
  std::vector<std::pair<NodeId, NodeId>> ring;
  std::vector<std::vector<Edge>> adj(130);
  for (NodeId i = 0; i < 130; ++i) {
    const NodeId j = (i + 1) % 130;
    adj[i].push_back({j, 1.0});
    adj[j].push_back({i, 1.0});
  }
  const SparseDigraph g(adj);
  CHECK(std::abs(efficiency(g) - oracle::floyd_warshall_efficiency(oracle::skeleton_matrix(g))) <= 1e-12);
}

TEST_CASE("metrics are invariant under relabeling") {
  std::mt19937_64 rng(19);
  const SparseDigraph g = oracle::random_digraph(40, 0.1, rng);
  std::vector<NodeId> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const SparseDigraph h = relabel(g, perm);
  CHECK(clustering_coefficient(h) == doctest::Approx(clustering_coefficient(g)).epsilon(1e-12));
  CHECK(efficiency(h) == doctest::Approx(efficiency(g)).epsilon(1e-12));
}

TEST_CASE("efficiency grows with added edges") {
  std::mt19937_64 rng(23);
  std::vector<std::vector<Edge>> adj(30);
  double last = efficiency(SparseDigraph(adj));
  for (int step = 0; step < 80; ++step) {
    const auto a = static_cast<NodeId>(rng() % 30), b = static_cast<NodeId>(rng() % 30);
    if (a == b) continue;
    adj[a].push_back({b, 1.0});
    const double now = efficiency(SparseDigraph(adj));
    CHECK(now >= last);
    last = now;
  }
}

TEST_CASE("random equivalents") {
  const UndirectedGraph k4 = symmetrize(random_equivalent(4, 6, 1));
  CHECK(k4.num_edges == 6);
  CHECK(random_equivalent(5, 0, 1).num_edges() == 0);
  CHECK_THROWS_AS(random_equivalent(4, 7, 1), Error);

  const SparseDigraph a = random_equivalent(100, 500, 1);
  const SparseDigraph b = random_equivalent(100, 500, 1);
  const SparseDigraph c = random_equivalent(100, 500, 2);
  CHECK(symmetrize(a).num_edges == 500);
  CHECK(symmetrize(a).adjacency == symmetrize(b).adjacency);
  CHECK(symmetrize(a).adjacency != symmetrize(c).adjacency);
  CHECK(symmetrize(random_equivalent(30, 400, 3)).num_edges == 400);
}

TEST_CASE("small-world-ness") {
  const NetworkStats k = small_world_ness(complete(8), 5, 1);
  CHECK(k.clustering == 1.0);
  CHECK(k.efficiency == 1.0);
  CHECK(k.swn == doctest::Approx(1.0));
  CHECK(!k.swn_infinite);

  const NetworkStats empty = small_world_ness(SparseDigraph(5), 3, 1);
  CHECK(empty.swn_infinite);

  // clustered features: 4 tight groups of 50 points
  std::mt19937_64 rng(29);
  std::normal_distribution<double> jitter(0.0, 0.05);
  lapseg::FeatureMatrix f;
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < 50; ++i) {
      lapseg::FeatureRow row{};
      for (double& v : row) v = c + jitter(rng);
      f.rows.push_back(row);
    }
  }
  const SparseDigraph knn = build_knn_digraph(f, std::vector<ClassId>(200, 0), 10, 0.5);
  const NetworkStats s = small_world_ness(knn, 20, 7);
  CHECK(s.swn > 1.0);
  CHECK(s.baseline_samples == 20);
  const NetworkStats again = small_world_ness(knn, 20, 7);
  CHECK(again.swn == s.swn);
  CHECK(again.c_rand == s.c_rand);
}
