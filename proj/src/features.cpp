#include "lapseg/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "lapseg/error.hpp"

namespace lapseg {

LambdaPreset LambdaPreset::uniform() {
  return {"uniform", {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}};
}

LambdaPreset LambdaPreset::location() {
  return {"location", {1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
}

LambdaPreset LambdaPreset::parse(std::string_view text) {
  if (text == "uniform") return uniform();
  if (text == "location") return location();

  LambdaPreset preset{std::string(text), {}};
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view token = text.substr(pos, comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (count == kNumFeatures) {
      throw Error(ErrorCode::kParameter, "lambda needs exactly 9 weights: " + preset.name);
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size() || token.empty()) {
      throw Error(ErrorCode::kParameter,
                  "lambda must be 'uniform', 'location' or 9 numbers, got '" +
                      std::string(text) + "'");
    }
    preset.weights[count++] = value;
    pos = comma + 1;
  }
  if (count != kNumFeatures) {
    throw Error(ErrorCode::kParameter, "lambda needs exactly 9 weights: " + preset.name);
  }
  preset.validate();
  return preset;
}

void LambdaPreset::validate() const {
  bool any_positive = false;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kParameter, "lambda weights must be finite and >= 0");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw Error(ErrorCode::kParameter, "lambda needs a positive weight");
}

FeatureMatrix extract_raw_features(const RgbImage& img) {
  FeatureMatrix feats;
  feats.rows.resize(img.size());
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const Rgb& p = img.at(y, x);
      FeatureRow& f = feats.rows[y * img.width + x];
      f[kRowPos] = static_cast<double>(y);
      f[kColPos] = static_cast<double>(x);
      f[kRed] = p.r;
      f[kGreen] = p.g;
      f[kBlue] = p.b;
      f[kValue] = std::max({p.r, p.g, p.b});
      f[kExcessRed] = 2.0 * p.r - (p.g + p.b);
      f[kExcessGreen] = 2.0 * p.g - (p.r + p.b);
      f[kExcessBlue] = 2.0 * p.b - (p.g + p.r);
    }
  }
  return feats;
}

FeatureMatrix normalize_and_scale(FeatureMatrix feats, const LambdaPreset& lambda) {
  lambda.validate();
  const std::size_t n = feats.size();
  if (n < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "feature normalization needs at least 2 rows, got " + std::to_string(n));
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    double lo = feats[0][j];
    double hi = lo;
    double sum = 0.0;
    for (const FeatureRow& row : feats.rows) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
      sum += row[j];
    }
    const double mean = sum * inv_n;
    double ss = 0.0;
    for (const FeatureRow& row : feats.rows) {
      const double d = row[j] - mean;
      ss += d * d;
    }
    const double stddev = std::sqrt(ss * inv_n);
    if (lo == hi || !(stddev > 0.0)) {
      for (FeatureRow& row : feats.rows) row[j] = 0.0;
      continue;
    }
    const double scale = lambda.weights[j] / stddev;
    for (FeatureRow& row : feats.rows) row[j] = (row[j] - mean) * scale;
  }
  return feats;
}

}  // namespace lapseg
