#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace lapseg {

using ClassId = std::uint16_t;
inline constexpr ClassId kUnlabeled = 0;

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major RGB image with channels in [0, 1].
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rgb> pixels;

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h, Rgb fill = {})
      : width(w), height(h), pixels(w * h, fill) {}

  std::size_t size() const { return pixels.size(); }
  Rgb& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
  const Rgb& at(std::size_t row, std::size_t col) const {
    return pixels[row * width + col];
  }
};

/// 8-bit single channel image; used for trimaps and ground-truth masks.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> values;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0)
      : width(w), height(h), values(w * h, fill) {}
};

/// Per-pixel class assignment. 0 is unlabeled, 1..num_classes are classes.
struct LabelMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<ClassId> labels;
  std::size_t num_classes = 0;

  LabelMap() = default;
  LabelMap(std::size_t w, std::size_t h, std::size_t classes,
           ClassId fill = kUnlabeled)
      : width(w), height(h), labels(w * h, fill), num_classes(classes) {}

  std::size_t size() const { return labels.size(); }
  ClassId& at(std::size_t row, std::size_t col) { return labels[row * width + col]; }
  ClassId at(std::size_t row, std::size_t col) const {
    return labels[row * width + col];
  }
  std::size_t count_labeled() const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

// Throws kDimension / kParameter on inconsistent fields.
void validate(const RgbImage& img);
void validate(const LabelMap& labels);

}  // namespace lapseg
