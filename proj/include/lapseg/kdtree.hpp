#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "lapseg/features.hpp"

namespace lapseg {

struct Neighbor {
  std::uint32_t id = 0;
  double distance_sq = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact k-nearest-neighbour index over 9-D feature rows (Euclidean metric).
/// Results are ordered by (distance, id), so equidistant points resolve to
/// the lower id.
class KdTree {
 public:
  static constexpr std::uint32_t kNoExclude = std::numeric_limits<std::uint32_t>::max();

  explicit KdTree(const FeatureMatrix& feats, std::size_t leaf_size = 12);

  std::size_t size() const { return points_.size(); }

  // min(k, n - 1) nearest rows other than row i.
  std::vector<Neighbor> query(std::size_t i, std::size_t k) const;

  std::vector<Neighbor> query_point(const FeatureRow& point, std::size_t k,
                                    std::uint32_t exclude = kNoExclude) const;

 private:
  struct Node {
    // Leaves use [begin, end); inner nodes split on `dim` at `cut` with
    // children `left` / `right` (indices into nodes_).
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t dim = 0;
    double cut = 0.0;
    double low = 0.0;   // max coordinate of the left child along dim
    double high = 0.0;  // min coordinate of the right child along dim
    bool leaf = true;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end,
                      std::vector<std::uint32_t>& order);

  std::vector<FeatureRow> points_;    // original order
  std::vector<std::uint32_t> index_;  // leaf order -> original id
  std::vector<FeatureRow> packed_;    // points in leaf order
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
  std::uint32_t root_ = 0;

  friend class KnnSearch;
};

// Throws kInsufficientData when fewer than two rows are given.
KdTree build_kdtree(const FeatureMatrix& feats);

}  // namespace lapseg
