#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "lapseg/error.hpp"
#include "lapseg/graph.hpp"
#include "lapseg/kdtree.hpp"

using namespace lapseg;

namespace {

FeatureMatrix line(std::initializer_list<double> xs) {
  FeatureMatrix f;
  for (double x : xs) {
    FeatureRow row{};
    row[0] = x;
    f.rows.push_back(row);
  }
  return f;
}

FeatureMatrix random_rows(std::size_t n, std::uint64_t seed, int levels = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix f;
  f.rows.resize(n);
  for (auto& row : f.rows) {
    for (double& v : row) v = levels > 0 ? static_cast<double>(rng() % levels) : g(rng);
  }
  return f;
}

}  // namespace

TEST_CASE("gaussian weight") {
  CHECK(gaussian_weight(0.0, 0.5) == 1.0);
  CHECK(gaussian_weight(1.0, 0.5) == doctest::Approx(std::exp(-2.0)));
  CHECK(gaussian_weight(0.5, 0.5) == doctest::Approx(0.6065307));
  CHECK(gaussian_weight(100.0, 0.05) > 0.0);
  CHECK(gaussian_weight(0.3, 0.5) > gaussian_weight(0.31, 0.5));
  CHECK_THROWS_AS(gaussian_weight(1.0, 0.0), Error);
}

TEST_CASE("k-d tree on a line") {
  const KdTree tree = build_kdtree(line({0.0, 0.1, 5.0}));
  CHECK(tree.query(1, 1)[0].id == 0);
  CHECK(tree.query(0, 1)[0].id == 1);
  CHECK(tree.query(2, 1)[0].id == 1);
  CHECK(tree.query(0, 5).size() == 2);
  CHECK_THROWS_AS(build_kdtree(line({1.0})), Error);
}

TEST_CASE("k-d tree matches brute force including ties") {
  for (int levels : {0, 3}) {
    const FeatureMatrix f = random_rows(400, 9 + levels, levels);
    const KdTree tree = build_kdtree(f);
    const auto expected = oracle::brute_knn(f, 7);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto got = tree.query(i, 7);
      REQUIRE(got.size() == 7);
      for (std::size_t r = 0; r < 7; ++r) CHECK(got[r].id == expected[i][r]);
      for (std::size_t r = 1; r < 7; ++r) CHECK(got[r - 1].distance_sq <= got[r].distance_sq);
    }
  }
}

TEST_CASE("k-NN digraph examples") {
  const FeatureMatrix f = line({0.0, 0.1, 5.0});
  std::vector<ClassId> none(3, kUnlabeled);
  const SparseDigraph g = build_knn_digraph(f, none, 1, 0.5);
  CHECK(g.out_edges(0)[0].target == 1);
  CHECK(g.out_edges(1)[0].target == 0);
  CHECK(g.out_edges(2)[0].target == 1);
  CHECK(g.out_edges(2)[0].weight == doctest::Approx(std::exp(-(4.9 * 4.9) / 0.5)));

  std::vector<ClassId> first{1, 0, 0};
  const SparseDigraph h = build_knn_digraph(f, first, 1, 0.5);
  CHECK(h.out_degree(0) == 0);
  CHECK(h.out_edges(1)[0].target == 0);
  CHECK(h.out_edges(2)[0].target == 1);

  const SparseDigraph same = build_knn_digraph(line({1.0, 1.0}), std::vector<ClassId>(2, 0), 1, 0.5);
  CHECK(same.out_edges(0)[0].weight == 1.0);
}

TEST_CASE("k-NN digraph clamps k") {
  KnnBuildInfo info;
  const SparseDigraph g =
      build_knn_digraph(line({0, 1, 2, 3}), std::vector<ClassId>(4, 0), 10, 0.5, &info);
  CHECK(info.k_clamped);
  CHECK(info.effective_k == 3);
  for (std::size_t i = 0; i < 4; ++i) CHECK(g.out_degree(i) == 3);
}

TEST_CASE("k-NN digraph structure on random rows") {
  const FeatureMatrix f = random_rows(300, 21);
  std::vector<ClassId> labels(300, 0);
  for (std::size_t i = 0; i < 300; i += 7) labels[i] = 1 + i % 2;
  const SparseDigraph g = build_knn_digraph(f, labels, 10, 0.5);
  g.validate();
  const auto expected = oracle::brute_knn(f, 10);
  for (std::size_t i = 0; i < 300; ++i) {
    if (labels[i] != 0) {
      CHECK(g.out_degree(i) == 0);
      continue;
    }
    REQUIRE(g.out_degree(i) == 10);
    for (std::size_t r = 0; r < 10; ++r) CHECK(g.out_edges(i)[r].target == expected[i][r]);
  }
}

TEST_CASE("grid digraph") {
  FeatureMatrix f;
  f.rows.resize(9);
  for (std::size_t i = 0; i < 9; ++i) {
    f.rows[i][kRowPos] = static_cast<double>(i / 3);
    f.rows[i][kColPos] = static_cast<double>(i % 3);
  }
  std::vector<std::uint8_t> centre(9, 0);
  centre[4] = 1;
  const SparseDigraph g = build_grid_digraph(f, centre, 3, 3, 0.5);
  CHECK(g.out_degree(4) == 8);
  CHECK(g.num_edges() == 8);

  std::vector<std::uint8_t> all(9, 1);
  const SparseDigraph h = build_grid_digraph(f, all, 3, 3, 0.5);
  CHECK(h.out_degree(0) == 3);
  CHECK(h.out_degree(1) == 5);
  CHECK(h.out_degree(4) == 8);
  h.validate();
  // flat colour: horizontal and vertical neighbours weigh the same
  const auto e = h.out_edges(4);
  CHECK(e[1].target == 1);
  CHECK(e[3].target == 3);
  CHECK(e[1].weight == e[3].weight);
  CHECK(e[0].weight < e[1].weight);

  CHECK_THROWS_AS(build_grid_digraph(f, std::vector<std::uint8_t>(8, 1), 3, 3, 0.5), Error);
}
