#include "lapseg/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "lapseg/error.hpp"
#include "lapseg/parallel.hpp"

namespace lapseg {
namespace {

constexpr double kCubicA = -0.5;
constexpr int kFactor = 3;
// Kernel support is |x| < 2 in output units, i.e. 6 source pixels; the taps
// at exactly +-6 have zero weight.
constexpr int kRadius = 2 * kFactor - 1;
constexpr int kTaps = 2 * kRadius + 1;

double cubic(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return ((kCubicA + 2.0) * ax - (kCubicA + 3.0)) * ax * ax + 1.0;
  if (ax < 2.0) return ((kCubicA * ax - 5.0 * kCubicA) * ax + 8.0 * kCubicA) * ax - 4.0 * kCubicA;
  return 0.0;
}

std::array<double, kTaps> make_kernel() {
  std::array<double, kTaps> w{};
  double sum = 0.0;
  for (int t = 0; t < kTaps; ++t) {
    w[t] = cubic(static_cast<double>(t - kRadius) / kFactor);
    sum += w[t];
  }
  for (double& v : w) v /= sum;
  return w;
}

const std::array<double, kTaps>& kernel() {
  static const std::array<double, kTaps> w = make_kernel();
  return w;
}

std::size_t clamp_index(long i, std::size_t n) {
  if (i < 0) return 0;
  if (static_cast<std::size_t>(i) >= n) return n - 1;
  return static_cast<std::size_t>(i);
}

// Filters one line of `n` samples spaced `stride` apart, writing `out_n`
// outputs. Each output is formed relative to the sample under its centre so
// that flat input reproduces exactly.
template <typename Get, typename Put>
void filter_line(std::size_t n, std::size_t out_n, Get get, Put put) {
  const auto& w = kernel();
  for (std::size_t o = 0; o < out_n; ++o) {
    const long centre = static_cast<long>(o) * kFactor + 1;
    const Rgb ref = get(clamp_index(centre, n));
    double dr = 0.0, dg = 0.0, db = 0.0;
    for (int t = 0; t < kTaps; ++t) {
      const Rgb s = get(clamp_index(centre + t - kRadius, n));
      dr += w[t] * (s.r - ref.r);
      dg += w[t] * (s.g - ref.g);
      db += w[t] * (s.b - ref.b);
    }
    put(o, Rgb{ref.r + dr, ref.g + dg, ref.b + db});
  }
}

}  // namespace

std::size_t third_size(std::size_t dim) { return (dim + kFactor - 1) / kFactor; }

RgbImage downscale_bicubic(const RgbImage& img) {
  validate(img);
  if (img.width < 3 || img.height < 3) {
    throw Error(ErrorCode::kTooSmall, "bicubic downscale needs at least 3x3 pixels, got " +
                                          std::to_string(img.width) + "x" +
                                          std::to_string(img.height));
  }
  const std::size_t out_w = third_size(img.width);
  const std::size_t out_h = third_size(img.height);

  RgbImage horizontal(out_w, img.height);
  parallel_for(img.height, 16, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      filter_line(
          img.width, out_w, [&](std::size_t x) { return img.at(y, x); },
          [&](std::size_t o, Rgb v) { horizontal.at(y, o) = v; });
    }
  });

  RgbImage out(out_w, out_h);
  parallel_for(out_w, 16, [&](std::size_t x0, std::size_t x1) {
    for (std::size_t x = x0; x < x1; ++x) {
      filter_line(
          img.height, out_h, [&](std::size_t y) { return horizontal.at(y, x); },
          [&](std::size_t o, Rgb v) {
            out.at(o, x) = Rgb{std::clamp(v.r, 0.0, 1.0), std::clamp(v.g, 0.0, 1.0),
                               std::clamp(v.b, 0.0, 1.0)};
          });
    }
  });
  return out;
}

LabelMap downscale_nearest(const LabelMap& labels, std::size_t target_w,
                           std::size_t target_h) {
  validate(labels);
  if (target_w == 0 || target_h == 0 || target_w > labels.width ||
      target_h > labels.height) {
    throw Error(ErrorCode::kDimension,
                "nearest downscale target " + std::to_string(target_w) + "x" +
                    std::to_string(target_h) + " does not fit source " +
                    std::to_string(labels.width) + "x" + std::to_string(labels.height));
  }
  // floor((dst + 0.5) * src / dst_dim) evaluated in integers.
  const auto source = [](std::size_t dst, std::size_t src_dim, std::size_t dst_dim) {
    return std::min(src_dim - 1, ((2 * dst + 1) * src_dim) / (2 * dst_dim));
  };
  LabelMap out(target_w, target_h, labels.num_classes);
  for (std::size_t y = 0; y < target_h; ++y) {
    const std::size_t sy = source(y, labels.height, target_h);
    for (std::size_t x = 0; x < target_w; ++x) {
      out.at(y, x) = labels.at(sy, source(x, labels.width, target_w));
    }
  }
  return out;
}

DominationMatrix upscale_bilinear(const DominationMatrix& dom, std::size_t src_w,
                                  std::size_t src_h, std::size_t dst_w,
                                  std::size_t dst_h) {
  if (src_w == 0 || src_h == 0 || dst_w == 0 || dst_h == 0 || dom.n != src_w * src_h ||
      dom.values.size() != dom.n * dom.num_classes) {
    throw Error(ErrorCode::kDimension,
                "bilinear upscale: " + std::to_string(dom.n) + " rows do not form a " +
                    std::to_string(src_w) + "x" + std::to_string(src_h) + " grid");
  }
  struct Tap {
    std::size_t i0, i1;
    double f;
  };
  const auto taps = [](std::size_t src, std::size_t dst) {
    std::vector<Tap> out(dst);
    const double scale = static_cast<double>(src) / static_cast<double>(dst);
    for (std::size_t d = 0; d < dst; ++d) {
      const double s = std::clamp((static_cast<double>(d) + 0.5) * scale - 0.5, 0.0,
                                  static_cast<double>(src - 1));
      const auto i0 = static_cast<std::size_t>(s);
      out[d] = {i0, std::min(i0 + 1, src - 1), s - static_cast<double>(i0)};
    }
    return out;
  };
  const std::vector<Tap> xs = taps(src_w, dst_w);
  const std::vector<Tap> ys = taps(src_h, dst_h);
  const std::size_t classes = dom.num_classes;

  DominationMatrix out(dst_w * dst_h, classes);
  parallel_for(dst_h, 8, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      const Tap ty = ys[y];
      for (std::size_t x = 0; x < dst_w; ++x) {
        const Tap tx = xs[x];
        const auto r00 = dom.row(ty.i0 * src_w + tx.i0);
        const auto r01 = dom.row(ty.i0 * src_w + tx.i1);
        const auto r10 = dom.row(ty.i1 * src_w + tx.i0);
        const auto r11 = dom.row(ty.i1 * src_w + tx.i1);
        const double w01 = tx.f * (1.0 - ty.f);
        const double w10 = (1.0 - tx.f) * ty.f;
        const double w11 = tx.f * ty.f;
        auto dst = out.row(y * dst_w + x);
        for (std::size_t c = 0; c < classes; ++c) {
          const double base = r00[c];
          dst[c] = base + w01 * (r01[c] - base) + w10 * (r10[c] - base) +
                   w11 * (r11[c] - base);
        }
      }
    }
  });
  return out;
}

}  // namespace lapseg
