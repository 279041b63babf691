#include "lapseg/graph.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lapseg/error.hpp"
#include "lapseg/kdtree.hpp"
#include "lapseg/parallel.hpp"

namespace lapseg {

SparseDigraph::SparseDigraph(const std::vector<std::vector<Edge>>& adjacency)
    : offsets_(adjacency.size() + 1, 0) {
  for (std::size_t i = 0; i < adjacency.size(); ++i) {
    offsets_[i + 1] = offsets_[i] + adjacency[i].size();
  }
  edges_.reserve(offsets_.back());
  for (const auto& list : adjacency) edges_.insert(edges_.end(), list.begin(), list.end());
}

SparseDigraph::SparseDigraph(std::vector<std::size_t> offsets, std::vector<Edge> edges)
    : offsets_(std::move(offsets)), edges_(std::move(edges)) {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != edges_.size()) {
    throw Error(ErrorCode::kDimension, "CSR offsets do not match the edge array");
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) {
    if (offsets_[i] < offsets_[i - 1]) {
      throw Error(ErrorCode::kDimension, "CSR offsets must be non-decreasing");
    }
  }
}

void SparseDigraph::validate() const {
  const std::size_t n = num_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : out_edges(i)) {
      if (e.target >= n) {
        throw Error(ErrorCode::kDimension, "edge " + std::to_string(i) + "->" +
                                               std::to_string(e.target) + " leaves the graph");
      }
      if (e.target == i) {
        throw Error(ErrorCode::kDimension, "self-loop at node " + std::to_string(i));
      }
      if (!(e.weight > 0.0 && e.weight <= 1.0)) {
        throw Error(ErrorCode::kParameter, "edge weight outside (0, 1] at node " +
                                               std::to_string(i));
      }
    }
  }
}

double gaussian_weight(double distance, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kParameter, "sigma must be > 0");
  if (!(distance >= 0.0)) throw Error(ErrorCode::kParameter, "distance must be >= 0");
  const double w = std::exp(-(distance * distance) / (2.0 * sigma * sigma));
  return std::max(w, std::numeric_limits<double>::min());
}

SparseDigraph build_knn_digraph(const FeatureMatrix& feats,
                                std::span<const ClassId> labels, std::size_t k,
                                double sigma, KnnBuildInfo* info) {
  const std::size_t n = feats.size();
  if (labels.size() != n) {
    throw Error(ErrorCode::kDimension, "labels (" + std::to_string(labels.size()) +
                                           ") and features (" + std::to_string(n) +
                                           ") differ in length");
  }
  if (k < 1) throw Error(ErrorCode::kParameter, "k must be >= 1");
  if (!(sigma > 0.0)) throw Error(ErrorCode::kParameter, "sigma must be > 0");

  const std::size_t effective_k = n > 0 ? std::min(k, n - 1) : 0;
  if (info != nullptr) *info = {k, effective_k, effective_k < k};

  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = offsets[i] + (labels[i] == kUnlabeled ? effective_k : 0);
  }
  std::vector<Edge> edges(offsets.back());
  if (edges.empty()) return SparseDigraph(std::move(offsets), std::move(edges));

  const KdTree tree = build_kdtree(feats);
  parallel_for(n, 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (labels[i] != kUnlabeled) continue;
      const std::vector<Neighbor> nn = tree.query(i, effective_k);
      Edge* out = edges.data() + offsets[i];
      for (std::size_t j = 0; j < nn.size(); ++j) {
        out[j] = {nn[j].id, gaussian_weight(std::sqrt(nn[j].distance_sq), sigma)};
      }
    }
  });
  return SparseDigraph(std::move(offsets), std::move(edges));
}

SparseDigraph build_grid_digraph(const FeatureMatrix& feats,
                                 std::span<const std::uint8_t> unlabeled_mask,
                                 std::size_t width, std::size_t height, double sigma) {
  const std::size_t n = width * height;
  if (feats.size() != n || unlabeled_mask.size() != n) {
    throw Error(ErrorCode::kDimension,
                "grid " + std::to_string(width) + "x" + std::to_string(height) +
                    " needs " + std::to_string(n) + " features and mask entries, got " +
                    std::to_string(feats.size()) + " and " +
                    std::to_string(unlabeled_mask.size()));
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::kParameter, "sigma must be > 0");

  constexpr int kOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                  {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  const auto neighbours = [&](std::size_t y, std::size_t x, auto&& emit) {
    for (const auto& d : kOffsets) {
      const long ny = static_cast<long>(y) + d[0];
      const long nx = static_cast<long>(x) + d[1];
      if (ny < 0 || nx < 0 || ny >= static_cast<long>(height) ||
          nx >= static_cast<long>(width)) {
        continue;
      }
      emit(static_cast<std::size_t>(ny) * width + static_cast<std::size_t>(nx));
    }
  };

  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = y * width + x;
      std::size_t degree = 0;
      if (unlabeled_mask[i] != 0) neighbours(y, x, [&](std::size_t) { ++degree; });
      offsets[i + 1] = offsets[i] + degree;
    }
  }
  std::vector<Edge> edges(offsets.back());
  parallel_for(height, 16, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const std::size_t i = y * width + x;
        if (unlabeled_mask[i] == 0) continue;
        Edge* out = edges.data() + offsets[i];
        neighbours(y, x, [&](std::size_t j) {
          const double d = std::sqrt(squared_distance(feats[i], feats[j]));
          *out++ = {static_cast<NodeId>(j), gaussian_weight(d, sigma)};
        });
      }
    }
  });
  return SparseDigraph(std::move(offsets), std::move(edges));
}

}  // namespace lapseg
