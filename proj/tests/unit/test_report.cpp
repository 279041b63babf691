#include <doctest.h>

#include "lapseg/error.hpp"
#include "lapseg/report.hpp"

using namespace lapseg;
using nlohmann::json;

TEST_CASE("config overrides") {
  SegConfig cfg;
  apply_overrides(cfg, json{{"k", 8}, {"sigma", 0.4}, {"lambda", "location"}});
  CHECK(cfg.k == 8);
  CHECK(cfg.sigma == 0.4);
  CHECK(cfg.lambda.name == "location");
  apply_overrides(cfg, json{{"lambda", {1, 1, 1, 1, 1, 1, 1, 1, 2}}});
  CHECK(cfg.lambda.weights[8] == 2.0);
  apply_overrides(cfg, nullptr);
  CHECK(cfg.k == 8);

  const SegConfig before = cfg;
  CHECK_THROWS_AS(apply_overrides(cfg, json{{"k", 0}}), Error);
  CHECK_THROWS_AS(apply_overrides(cfg, json{{"k", -3}}), Error);
  CHECK_THROWS_AS(apply_overrides(cfg, json{{"sigma", "big"}}), Error);
  CHECK_THROWS_AS(apply_overrides(cfg, json{{"colour", 1}}), Error);
  CHECK_THROWS_AS(apply_overrides(cfg, json{{"sigma", 0.3}, {"omega", 0}}), Error);
  CHECK(cfg.sigma == before.sigma);
}

TEST_CASE("json reports") {
  NetworkStats s;
  s.swn_infinite = true;
  CHECK(to_json(s).at("swn").is_null());

  SegmentationResult r;
  r.labels = LabelMap(2, 2, 2);
  r.labels.labels = {1, 2, 2, 2};
  r.seed_pixels = 2;
  r.stage1_labeled_pixels = 1;
  r.stage2_labeled_pixels = 1;
  const json j = to_json(r);
  CHECK(j.at("class_counts") == json({0, 1, 3}));
  CHECK(j.at("stage1_labeled_fraction") == 0.25);
  CHECK(j.at("timing_s").contains("total"));
  CHECK(to_json(SegConfig{}).at("k") == 10);
}
