#include <doctest.h>

#include <random>
#include <set>

#include "lapseg/error.hpp"
#include "lapseg/resample.hpp"

using namespace lapseg;

TEST_CASE("bicubic output size is ceil(dim / 3)") {
  CHECK(downscale_bicubic(RgbImage(576, 432)).width == 192);
  CHECK(downscale_bicubic(RgbImage(576, 432)).height == 144);
  const RgbImage out = downscale_bicubic(RgbImage(800, 600));
  CHECK(out.width == 267);
  CHECK(out.height == 200);
  CHECK(third_size(4) == 2);
}

TEST_CASE("bicubic keeps constant images bit-exact") {
  for (double v : {0.0, 0.5, 128.0 / 255.0, 1.0, 0.1}) {
    const RgbImage out = downscale_bicubic(RgbImage(31, 17, {v, v, v}));
    for (const Rgb& p : out.pixels) {
      REQUIRE(p.r == v);
      REQUIRE(p.g == v);
      REQUIRE(p.b == v);
    }
  }
}

TEST_CASE("bicubic output stays in range and is deterministic") {
  std::mt19937_64 rng(3);
  RgbImage img(40, 25);
  for (Rgb& p : img.pixels) p = {double(rng() % 2), double(rng() % 2), double(rng() % 2)};
  const RgbImage a = downscale_bicubic(img);
  const RgbImage b = downscale_bicubic(img);
  CHECK(a.pixels == b.pixels);
  for (const Rgb& p : a.pixels) {
    CHECK(p.r >= 0.0);
    CHECK(p.r <= 1.0);
  }
}

TEST_CASE("bicubic rejects images below 3x3") {
  CHECK_THROWS_AS(downscale_bicubic(RgbImage(2, 5)), Error);
}

TEST_CASE("nearest downscale") {
  LabelMap all2(3, 3, 2, 2);
  const LabelMap one = downscale_nearest(all2, 1, 1);
  CHECK(one.labels == std::vector<ClassId>{2});
  CHECK(one.num_classes == 2);

  LabelMap blocks(6, 6, 4);
  for (std::size_t y = 0; y < 6; ++y) {
    for (std::size_t x = 0; x < 6; ++x) blocks.at(y, x) = static_cast<ClassId>(1 + (y / 3) * 2 + x / 3);
  }
  const LabelMap two = downscale_nearest(blocks, 2, 2);
  CHECK(two.labels == std::vector<ClassId>{1, 2, 3, 4});

  // sampled source is floor((dst + 0.5) * 3)
  LabelMap ramp(64, 1, 64);
  for (std::size_t x = 0; x < 64; ++x) ramp.labels[x] = static_cast<ClassId>(x);
  const LabelMap small = downscale_nearest(ramp, 22, 1);
  for (std::size_t x = 0; x < 22; ++x) {
    CHECK(small.labels[x] == static_cast<ClassId>(std::min<std::size_t>(63, ((2 * x + 1) * 64) / 44)));
  }

  CHECK_THROWS_AS(downscale_nearest(all2, 4, 1), Error);
}

TEST_CASE("nearest downscale never invents classes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    LabelMap labels(5 + rng() % 30, 5 + rng() % 30, 3);
    for (ClassId& l : labels.labels) l = static_cast<ClassId>(rng() % 4 == 0 ? rng() % 4 : 0);
    const std::set<ClassId> in(labels.labels.begin(), labels.labels.end());
    const LabelMap out = downscale_nearest(labels, third_size(labels.width), third_size(labels.height));
    for (ClassId l : out.labels) CHECK(in.count(l) == 1);
  }
}

TEST_CASE("bilinear upscale") {
  SUBCASE("constant rows stay constant") {
    DominationMatrix dom(6, 2);
    for (std::size_t i = 0; i < 6; ++i) dom.row(i)[0] = 1.0;
    const DominationMatrix out = upscale_bilinear(dom, 3, 2, 9, 6);
    for (std::size_t i = 0; i < out.n; ++i) {
      CHECK(out.row(i)[0] == 1.0);
      CHECK(out.row(i)[1] == 0.0);
    }
  }
  SUBCASE("two-pixel line") {
    DominationMatrix dom(2, 2);
    dom.row(0)[0] = 1.0;
    dom.row(1)[1] = 1.0;
    const DominationMatrix out = upscale_bilinear(dom, 2, 1, 4, 1);
    CHECK(out.row(0)[0] == 1.0);
    CHECK(out.row(1)[0] == doctest::Approx(0.75));
    CHECK(out.row(2)[0] == doctest::Approx(0.25));
    CHECK(out.row(3)[1] == 1.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out.row(i)[0] + out.row(i)[1] == doctest::Approx(1.0));
  }
  SUBCASE("one-hot grid keeps row sums") {
    DominationMatrix dom(4, 2);
    dom.row(0)[0] = dom.row(1)[1] = dom.row(2)[1] = dom.row(3)[0] = 1.0;
    const DominationMatrix out = upscale_bilinear(dom, 2, 2, 6, 6);
    REQUIRE(out.n == 36);
    for (std::size_t i = 0; i < 36; ++i) {
      CHECK(std::abs(out.row(i)[0] + out.row(i)[1] - 1.0) <= 1e-9);
    }
  }
  SUBCASE("random row-stochastic input") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DominationMatrix dom(7 * 5, 4);
    for (std::size_t i = 0; i < dom.n; ++i) {
      double s = 0.0;
      for (double& v : dom.row(i)) s += (v = u(rng));
      for (double& v : dom.row(i)) v /= s;
    }
    const DominationMatrix out = upscale_bilinear(dom, 7, 5, 20, 14);
    for (std::size_t i = 0; i < out.n; ++i) {
      double s = 0.0;
      for (double v : out.row(i)) s += v;
      CHECK(std::abs(s - 1.0) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(upscale_bilinear(DominationMatrix(5, 2), 2, 2, 4, 4), Error);
}
