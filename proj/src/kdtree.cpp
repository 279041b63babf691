#include "lapseg/kdtree.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "lapseg/error.hpp"

namespace lapseg {

// Bounded best-k set ordered by (distance, id); the search walks the tree
// keeping a per-dimension lower bound of the distance to the current cell.
class KnnSearch {
 public:
  KnnSearch(const KdTree& tree, const FeatureRow& query, std::size_t k,
            std::uint32_t exclude)
      : tree_(tree), query_(query), k_(k), exclude_(exclude) {
    best_.reserve(k + 1);
  }

  std::vector<Neighbor> run() {
    if (k_ == 0 || tree_.nodes_.empty()) return {};
    std::array<double, kNumFeatures> dists{};
    visit(tree_.root_, 0.0, dists);
    return std::move(best_);
  }

 private:
  bool full() const { return best_.size() == k_; }

  void consider(double d, std::uint32_t id) {
    if (full()) {
      const Neighbor& worst = best_.back();
      if (d > worst.distance_sq || (d == worst.distance_sq && id > worst.id)) return;
    }
    const Neighbor candidate{id, d};
    auto pos = std::upper_bound(best_.begin(), best_.end(), candidate,
                                [](const Neighbor& a, const Neighbor& b) {
                                  return a.distance_sq < b.distance_sq ||
                                         (a.distance_sq == b.distance_sq && a.id < b.id);
                                });
    best_.insert(pos, candidate);
    if (best_.size() > k_) best_.pop_back();
  }

  // Equal bounds are still visited: a tie at the k-th distance may hold a
  // lower id.
  bool reachable(double min_dist) const {
    return !full() || min_dist <= best_.back().distance_sq;
  }

  void visit(std::uint32_t node_index, double min_dist,
             std::array<double, kNumFeatures>& dists) {
    const KdTree::Node& node = tree_.nodes_[node_index];
    if (node.leaf) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t id = tree_.index_[i];
        if (id == exclude_) continue;
        consider(squared_distance(query_, tree_.packed_[i]), id);
      }
      return;
    }
    const double q = query_[node.dim];
    const double below = q - node.low;
    const double above = q - node.high;
    std::uint32_t near_child, far_child;
    double cut_dist;
    if (below + above < 0.0) {
      near_child = node.left;
      far_child = node.right;
      cut_dist = above * above;
    } else {
      near_child = node.right;
      far_child = node.left;
      cut_dist = below * below;
    }
    visit(near_child, min_dist, dists);

    const double saved = dists[node.dim];
    const double far_min = min_dist + cut_dist - saved;
    if (reachable(far_min)) {
      dists[node.dim] = cut_dist;
      visit(far_child, far_min, dists);
      dists[node.dim] = saved;
    }
  }

  const KdTree& tree_;
  const FeatureRow& query_;
  std::size_t k_;
  std::uint32_t exclude_;
  std::vector<Neighbor> best_;
};

KdTree::KdTree(const FeatureMatrix& feats, std::size_t leaf_size)
    : points_(feats.rows), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  std::vector<std::uint32_t> order(points_.size());
  std::iota(order.begin(), order.end(), 0u);
  if (!order.empty()) {
    nodes_.reserve(2 * (points_.size() / leaf_size_ + 1));
    root_ = build(0, static_cast<std::uint32_t>(order.size()), order);
  }
  index_ = std::move(order);
  packed_.resize(points_.size());
  for (std::size_t i = 0; i < index_.size(); ++i) packed_[i] = points_[index_[i]];
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end,
                            std::vector<std::uint32_t>& order) {
  const auto node_index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return node_index;

  // Split on the dimension with the widest spread.
  FeatureRow lo = points_[order[begin]];
  FeatureRow hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    const FeatureRow& p = points_[order[i]];
    for (std::size_t d = 0; d < kNumFeatures; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  std::size_t dim = 0;
  for (std::size_t d = 1; d < kNumFeatures; ++d) {
    if (hi[d] - lo[d] > hi[dim] - lo[dim]) dim = d;
  }
  if (hi[dim] - lo[dim] <= 0.0) return node_index;  // all points coincide

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][dim];
                     const double pb = points_[b][dim];
                     return pa < pb || (pa == pb && a < b);
                   });
  double low = points_[order[begin]][dim];
  for (std::uint32_t i = begin; i < mid; ++i) low = std::max(low, points_[order[i]][dim]);
  double high = points_[order[mid]][dim];
  for (std::uint32_t i = mid; i < end; ++i) high = std::min(high, points_[order[i]][dim]);

  const std::uint32_t left = build(begin, mid, order);
  const std::uint32_t right = build(mid, end, order);
  Node& node = nodes_[node_index];
  node.leaf = false;
  node.dim = static_cast<std::uint32_t>(dim);
  node.low = low;
  node.high = high;
  node.cut = 0.5 * (low + high);
  node.left = left;
  node.right = right;
  return node_index;
}

std::vector<Neighbor> KdTree::query(std::size_t i, std::size_t k) const {
  if (i >= points_.size()) {
    throw Error(ErrorCode::kDimension, "query index " + std::to_string(i) + " out of range");
  }
  const std::size_t available = points_.size() - 1;
  return KnnSearch(*this, points_[i], std::min(k, available), static_cast<std::uint32_t>(i))
      .run();
}

std::vector<Neighbor> KdTree::query_point(const FeatureRow& point, std::size_t k,
                                          std::uint32_t exclude) const {
  std::size_t available = points_.size();
  if (exclude < points_.size()) --available;
  return KnnSearch(*this, point, std::min(k, available), exclude).run();
}

KdTree build_kdtree(const FeatureMatrix& feats) {
  if (feats.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "k-d tree needs at least 2 rows, got " + std::to_string(feats.size()));
  }
  return KdTree(feats);
}

}  // namespace lapseg
