#pragma once

#include <cstddef>

#include "lapseg/domination.hpp"
#include "lapseg/image.hpp"

namespace lapseg {

/// ceil(dim / 3): the side length used for the stage-1 image.
std::size_t third_size(std::size_t dim);

// Bicubic (a = -0.5) reduction to one third per dimension. The kernel is
// widened by the factor 3 (antialiasing), edges clamp, and every channel is
// clamped to [0, 1]. Requires width, height >= 3.
RgbImage downscale_bicubic(const RgbImage& img);

// Nearest-neighbour resampling of a label map; source index is
// floor((dst + 0.5) * src / dst) clamped to the last pixel.
LabelMap downscale_nearest(const LabelMap& labels, std::size_t target_w,
                           std::size_t target_h);

// Bilinear enlargement of a row-major grid of domination rows, one class
// channel at a time. Pixel centres are aligned, borders clamp.
DominationMatrix upscale_bilinear(const DominationMatrix& dom, std::size_t src_w,
                                  std::size_t src_h, std::size_t dst_w,
                                  std::size_t dst_h);

}  // namespace lapseg
