#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lapseg {

/// Per-node class-membership vectors, row-stochastic. Rows flagged in
/// `clamped` belong to labeled nodes: they are one-hot and never updated.
struct DominationMatrix {
  std::size_t n = 0;
  std::size_t num_classes = 0;
  std::vector<double> values;          // n * num_classes, row-major
  std::vector<std::uint8_t> clamped;   // n

  DominationMatrix() = default;
  DominationMatrix(std::size_t nodes, std::size_t classes)
      : n(nodes), num_classes(classes), values(nodes * classes, 0.0),
        clamped(nodes, 0) {}

  std::span<double> row(std::size_t i) {
    return {values.data() + i * num_classes, num_classes};
  }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * num_classes, num_classes};
  }
  bool is_clamped(std::size_t i) const { return clamped[i] != 0; }
};

}  // namespace lapseg
