#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lapseg/image.hpp"

namespace lapseg {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

/// Decoded samples before any colour interpretation.
struct RawImage {
  std::size_t width = 0;
  std::size_t height = 0;
  int channels = 0;      // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  int bit_depth = 0;     // 8 or 16 after expansion
  std::uint32_t max_value = 255;
  std::vector<std::uint16_t> samples;  // width * height * channels
  bool indexed = false;  // samples are palette indices (channels == 1)
  std::size_t palette_size = 0;
};

// Accepts PNG (gray, gray+alpha, rgb, rgba, indexed; 1..16 bit) and binary
// PNM (P5/P6). Palette PNGs are expanded to RGB, alpha is dropped and 16-bit
// samples are divided by 65535.
RgbImage decode_image(ByteSpan bytes);

// Like decode_image but keeps palette indices; used for label maps.
RawImage decode_raw(ByteSpan bytes, bool expand_palette = true);

// 8-bit single channel view. RGB inputs must have R == G == B per pixel.
GrayImage decode_gray(ByteSpan bytes);

// Inverse of encode_labelmap: pixel value = class id, num_classes is the
// palette length minus one.
LabelMap decode_labelmap(ByteSpan bytes);

/// Fixed label palette: index 0 is black, classes cycle through 12 colours.
std::array<std::uint8_t, 3> label_color(ClassId id);

// Indexed PNG with palette entries 0..num_classes. num_classes > 255 throws
// kTooManyClasses.
Bytes encode_labelmap(const LabelMap& labels);

Bytes encode_png(const RgbImage& img);
Bytes encode_png(const GrayImage& img);
Bytes encode_ppm(const RgbImage& img);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteSpan bytes);

}  // namespace lapseg
