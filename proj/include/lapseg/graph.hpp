#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lapseg/features.hpp"
#include "lapseg/image.hpp"

namespace lapseg {

using NodeId = std::uint32_t;

struct Edge {
  NodeId target = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable out-adjacency (CSR) with per-edge weights.
class SparseDigraph {
 public:
  SparseDigraph() = default;
  explicit SparseDigraph(std::size_t n) : offsets_(n + 1, 0) {}
  explicit SparseDigraph(const std::vector<std::vector<Edge>>& adjacency);
  SparseDigraph(std::vector<std::size_t> offsets, std::vector<Edge> edges);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const Edge> out_edges(std::size_t i) const {
    return {edges_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t out_degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }

  // Throws kDimension when a target is out of range or a self-loop exists,
  // kParameter when a weight is outside (0, 1].
  void validate() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Edge> edges_;
};

// exp(-d^2 / (2 sigma^2)), floored at the smallest normal double so that
// weights stay strictly positive for far neighbours.
double gaussian_weight(double distance, double sigma);

struct KnnBuildInfo {
  std::size_t requested_k = 0;
  std::size_t effective_k = 0;
  bool k_clamped = false;
};

// Each unlabeled node (label 0) points to its min(k, n-1) nearest neighbours in
// feature space (exact, ties to the lower id); labeled nodes get no edges.
SparseDigraph build_knn_digraph(const FeatureMatrix& feats,
                                std::span<const ClassId> labels, std::size_t k,
                                double sigma, KnnBuildInfo* info = nullptr);

// 8-neighbourhood grid. Nodes with unlabeled_mask[i] != 0 get edges to every
// in-bounds neighbour in the order NW, N, NE, W, E, SW, S, SE.
SparseDigraph build_grid_digraph(const FeatureMatrix& feats,
                                 std::span<const std::uint8_t> unlabeled_mask,
                                 std::size_t width, std::size_t height, double sigma);

}  // namespace lapseg
