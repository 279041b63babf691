#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "../support/synthetic.hpp"
#include "lapseg/bench.hpp"
#include "lapseg/codec.hpp"
#include "lapseg/error.hpp"

using namespace lapseg;
namespace fs = std::filesystem;

namespace {

// Two-half image with a trimap whose unknown band is the middle third of
// each row.
LoadedItem synthetic_item(std::size_t w = 48, std::size_t h = 48) {
  LoadedItem item;
  item.id = "halves";
  item.image = synthetic::two_halves(w, h);
  item.seeds = LabelMap(w, h, 2);
  item.eval_mask.assign(w * h, 0);
  item.truth.labels = LabelMap(w, h, 2);
  item.truth.valid.assign(w * h, 1);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const ClassId c = synthetic::half_class(w, x);
      item.truth.labels.at(y, x) = c;
      if (x < w / 3 || x >= w - w / 3) {
        item.seeds.at(y, x) = c;
      } else {
        item.eval_mask[y * w + x] = 1;
      }
    }
  }
  return item;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lapseg_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("error rate arithmetic") {
  LabelMap truth(10, 10, 2, 1);
  LabelMap pred = truth;
  std::vector<std::uint8_t> mask(100, 1);
  CHECK(error_rate(pred, truth, mask) == 0.0);
  for (int i = 0; i < 4; ++i) pred.labels[i * 7] = 2;
  CHECK(error_rate(pred, truth, mask) == 0.04);
  for (ClassId& l : pred.labels) l = 2;
  CHECK(error_rate(pred, truth, mask) == 1.0);
  CHECK_THROWS_AS(error_rate(pred, truth, std::vector<std::uint8_t>(100, 0)), Error);
  CHECK_THROWS_AS(error_rate(pred, truth, std::vector<std::uint8_t>(99, 1)), Error);
}

TEST_CASE("error rate only counts disagreement") {
  LabelMap truth(4, 1, 2);
  truth.labels = {1, 1, 2, 2};
  LabelMap a = truth, b = truth;
  a.labels[0] = 2;
  b.labels[2] = 1;
  const std::vector<std::uint8_t> mask(4, 1);
  CHECK(error_rate(a, truth, mask) == error_rate(b, truth, mask));
}

TEST_CASE("truth binarization") {
  GrayImage g(4, 1);
  g.values = {0, 128, 129, 255};
  const GroundTruth t = parse_truth(g);
  CHECK(t.labels.labels == std::vector<ClassId>{1, 1, 2, 2});
  CHECK(t.valid == std::vector<std::uint8_t>{1, 0, 1, 1});
}

TEST_CASE("seed erosion") {
  LabelMap seeds(200, 200, 2);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds.labels[i] = i % 3 == 0 ? 0 : 1 + i % 2;
  CHECK(erode_seeds(seeds, 0.0, 5) == seeds);
  CHECK(erode_seeds(seeds, 0.5, 5) == erode_seeds(seeds, 0.5, 5));
  CHECK(erode_seeds(seeds, 0.5, 5) != erode_seeds(seeds, 0.5, 6));

  const LabelMap eroded = erode_seeds(seeds, 0.99, 9);
  const double n = static_cast<double>(seeds.count_labeled());
  const double kept = static_cast<double>(eroded.count_labeled());
  CHECK(std::abs(kept - 0.01 * n) <= 5.0 * std::sqrt(n * 0.01 * 0.99));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (eroded.labels[i] != 0) CHECK(eroded.labels[i] == seeds.labels[i]);
  }
  CHECK_THROWS_AS(erode_seeds(seeds, 1.0, 1), Error);
  CHECK_THROWS_AS(erode_seeds(seeds, -0.1, 1), Error);
}

TEST_CASE("grid specs") {
  CHECK(parse_grid("2:2:10") == std::vector<double>{2, 4, 6, 8, 10});
  CHECK(parse_grid("0:0.1:0.3").size() == 4);
  CHECK(parse_grid("1e-1,1e-4, 1e-10") == std::vector<double>{1e-1, 1e-4, 1e-10});
  CHECK(parse_grid("5") == std::vector<double>{5});
  CHECK_THROWS_AS(parse_grid("1:0:5"), Error);
  CHECK_THROWS_AS(parse_grid("5:1:1"), Error);
  CHECK_THROWS_AS(parse_grid("a,b"), Error);
  const auto k = default_k_grid();
  CHECK(k.front() == 2);
  CHECK(k[38] == 40);
  CHECK(k[39] == 50);
  CHECK(k.back() == 250);
  CHECK(k.size() == 39 + 21);
}

TEST_CASE("sweep parameter names") {
  CHECK(parse_sweep_param("k") == SweepParam::kK);
  CHECK(to_string(parse_sweep_param("omega")) == "omega");
  CHECK_THROWS_AS(parse_sweep_param("tau"), Error);
}

TEST_CASE("evaluation on the synthetic item") {
  const LoadedItem item = synthetic_item();
  const BenchRow row = evaluate(item, SegConfig{}, 2);
  CHECK(row.error_rate == 0.0);
  CHECK(row.seed_fraction == doctest::Approx(32.0 / 48.0));

  const std::vector<LoadedItem> items{item};
  const std::vector<std::size_t> grid{4, 10};
  const BenchReport report = run_grabcut(items, SegConfig{}, grid);
  CHECK(report.mean_error == 0.0);
  REQUIRE(report.best_k_rows.size() == 1);
  CHECK(*report.mean_best_k_error == 0.0);

  const std::vector<double> one{10};
  const auto sweep = parameter_sweep(items, SweepParam::kK, one, SegConfig{});
  REQUIRE(sweep.size() == 1);
  CHECK(sweep[0].mean_error == report.mean_error);
  const std::vector<double> bad{2.5};
  CHECK_THROWS_AS(parameter_sweep(items, SweepParam::kK, bad, SegConfig{}), Error);
}

TEST_CASE("sensitivity at p = 0 matches a plain run") {
  LoadedItem item = synthetic_item();
  // make the plain run imperfect so equality is meaningful
  item.truth.labels.at(20, 20) = 2;
  const std::vector<LoadedItem> items{item};
  const double plain = evaluate(item, SegConfig{}).error_rate;
  const std::vector<double> p{0.0};
  const auto curve = seed_sensitivity(items, p, 3, SegConfig{}, 1);
  CHECK(curve[0].mean_error_all == plain);
  CHECK(curve[0].mean_error_excluding_seeds == plain);
}

TEST_CASE("csv rows") {
  BenchRow row;
  row.image_id = "dog";
  row.k = 10;
  row.sigma = 0.5;
  row.omega = 1e-4;
  row.lambda = "1,1,1,1,1,1,1,1,1";
  row.error_rate = 0.25;
  const std::string line = to_csv_line(row);
  CHECK(line.rfind("dog,10,0.5,1e-04,\"1,1,1,1,1,1,1,1,1\",0.25,,0,0,", 0) == 0);
  CHECK(bench_csv_header().find("error_rate_excluding_former_seeds") != std::string::npos);
}

TEST_CASE("dataset discovery and loading") {
  const fs::path root = temp_dir("dataset");
  for (const char* sub : {"images", "trimaps", "truth", "scribbles-s1"}) fs::create_directory(root / sub);
  const std::size_t w = 30, h = 30;
  const RgbImage img = synthetic::two_halves(w, h);
  GrayImage tri(w, h, 128), truth(w, h, 0), amb(w, h, 0);
  RgbImage scrib(w, h, {1, 1, 1});
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      truth.values[y * w + x] = x >= w / 2 ? 255 : 0;
      if (x < 5) tri.values[y * w + x] = 64;
      if (x >= w - 5) tri.values[y * w + x] = 255;
    }
    scrib.at(y, 3) = {0, 1, 0};
    scrib.at(y, w - 3) = {1, 0, 1};
  }
  truth.values[w * 10 + 15] = 128;
  write_file(root / "images" / "a.png", encode_png(img));
  write_file(root / "trimaps" / "a.png", encode_png(tri));
  write_file(root / "truth" / "a.png", encode_png(truth));
  write_file(root / "scribbles-s1" / "a.png", encode_png(scrib));

  const auto items = discover_dataset(root / "images", root / "trimaps", root / "truth");
  REQUIRE(items.size() == 1);
  const LoadedItem t = load_item(items[0], SeedSource::kTrimap);
  CHECK(t.seeds.at(0, 0) == kBackgroundClass);
  CHECK(t.seeds.at(0, w - 1) == kForegroundClass);
  CHECK(t.eval_mask[w * 10 + 15] == 0);
  CHECK(t.eval_mask[w * 10 + 14] == 1);

  const auto s_items = discover_dataset(root / "images", root / "scribbles-s1", root / "truth");
  const LoadedItem s = load_item(s_items[0], SeedSource::kScribbles);
  CHECK(s.seeds.at(4, 3) == kBackgroundClass);
  CHECK(s.seeds.at(4, w - 3) == kForegroundClass);
  CHECK(s.eval_mask[4 * w + 3] == 0);
  CHECK(evaluate(s, SegConfig{}).error_rate == 0.0);

  write_file(root / "images" / "b.png", encode_png(img));
  try {
    discover_dataset(root / "images", root / "trimaps", root / "truth");
    FAIL("expected missing files");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
    CHECK(std::string(e.what()).find("b.*") != std::string::npos);
  }
  fs::remove_all(root);
}

TEST_CASE("erosion is nested across probabilities") {
  LabelMap seeds(40, 40, 2);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds.labels[i] = static_cast<ClassId>(i % 3);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    LabelMap previous = seeds;
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const LabelMap kept = erode_seeds(seeds, p, s);
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (kept.labels[i] != kUnlabeled) REQUIRE(previous.labels[i] == kept.labels[i]);
      }
      previous = kept;
    }
  }
}
