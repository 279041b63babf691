#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lapseg/image.hpp"

namespace lapseg {

inline constexpr std::size_t kNumFeatures = 9;
using FeatureRow = std::array<double, kNumFeatures>;

// Column order of a feature row.
enum Feature : std::size_t {
  kRowPos = 0,
  kColPos,
  kRed,
  kGreen,
  kBlue,
  kValue,
  kExcessRed,
  kExcessGreen,
  kExcessBlue,
};

/// One row per pixel in row-major pixel order.
struct FeatureMatrix {
  std::vector<FeatureRow> rows;

  std::size_t size() const { return rows.size(); }
  const FeatureRow& operator[](std::size_t i) const { return rows[i]; }
  FeatureRow& operator[](std::size_t i) { return rows[i]; }
};

/// Per-feature weights applied after normalization.
struct LambdaPreset {
  std::string name;
  FeatureRow weights{};

  static LambdaPreset uniform();   // all ones
  static LambdaPreset location();  // location 1.0, colour features 0.5

  // "uniform", "location", or nine comma-separated non-negative weights.
  static LambdaPreset parse(std::string_view text);

  void validate() const;
};

FeatureMatrix extract_raw_features(const RgbImage& img);

// Population z-score per column (constant columns become zeros), then column j
// is multiplied by lambda.weights[j]. Needs at least two rows.
FeatureMatrix normalize_and_scale(FeatureMatrix feats, const LambdaPreset& lambda);

inline FeatureMatrix image_features(const RgbImage& img, const LambdaPreset& lambda) {
  return normalize_and_scale(extract_raw_features(img), lambda);
}

inline double squared_distance(const FeatureRow& a, const FeatureRow& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return sum;
}

}  // namespace lapseg
