#include "lapseg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "lapseg/error.hpp"
#include "lapseg/resample.hpp"

namespace lapseg {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_inputs(const RgbImage& img, const LabelMap& seeds) {
  validate(img);
  validate(seeds);
  if (seeds.width != img.width || seeds.height != img.height) {
    throw Error(ErrorCode::kDimension,
                "seed map " + std::to_string(seeds.width) + "x" +
                    std::to_string(seeds.height) + " does not match image " +
                    std::to_string(img.width) + "x" + std::to_string(img.height));
  }
  if (third_size(img.width) * third_size(img.height) < 2) {
    throw Error(ErrorCode::kTooSmall, "image " + std::to_string(img.width) + "x" +
                                          std::to_string(img.height) +
                                          " is too small to downscale by 3");
  }
}

// Largest label present, or 0 without seeds.
ClassId max_label(const LabelMap& seeds) {
  ClassId top = kUnlabeled;
  for (ClassId l : seeds.labels) top = std::max(top, l);
  return top;
}

std::size_t class_count(const LabelMap& seeds) {
  const ClassId top = max_label(seeds);
  if (top == kUnlabeled) throw Error(ErrorCode::kMissingSeeds, "no seed pixels given");
  return std::max<std::size_t>(seeds.num_classes, top);
}

// The one class present among the seeds, or 0 when there are several.
ClassId sole_class(const LabelMap& seeds) {
  ClassId found = kUnlabeled;
  for (ClassId l : seeds.labels) {
    if (l == kUnlabeled || l == found) continue;
    if (found != kUnlabeled) return kUnlabeled;
    found = l;
  }
  return found;
}

void check_tau(const SegConfig& cfg, std::size_t classes) {
  if (!(cfg.tau > 1.0 / static_cast<double>(classes))) {
    throw Error(ErrorCode::kParameter, "tau must exceed 1/C = " +
                                           std::to_string(1.0 / static_cast<double>(classes)));
  }
}

StageObserver stage_observer(const SegmentObserver& observer, Stage stage) {
  if (!observer) return {};
  return [&observer, stage](std::size_t it, const DominationMatrix& dom) {
    observer(stage, it, dom);
  };
}

}  // namespace

void SegConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::kParameter, "k must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kParameter, "sigma must be > 0");
  }
  if (!(tau <= 1.0)) throw Error(ErrorCode::kParameter, "tau must be <= 1");
  lambda.validate();
  criteria().validate();
}

FirstStage run_first_stage(const RgbImage& img, const LabelMap& seeds,
                           const SegConfig& cfg, const SegmentObserver& observer) {
  cfg.validate();
  check_inputs(img, seeds);
  const std::size_t classes = class_count(seeds);
  check_tau(cfg, classes);

  FirstStage first;
  first.small_image = downscale_bicubic(img);
  const std::size_t sw = first.small_image.width;
  const std::size_t sh = first.small_image.height;
  first.small_seeds = downscale_nearest(seeds, sw, sh);
  first.small_seeds.num_classes = classes;

  const FeatureMatrix feats = image_features(first.small_image, cfg.lambda);
  first.graph = build_knn_digraph(feats, first.small_seeds.labels, cfg.k, cfg.sigma,
                                  &first.knn);
  first.small_dom = init_domination(first.small_seeds.labels, classes);
  first.result = run_stage(first.graph, first.small_dom, cfg.criteria(),
                           stage_observer(observer, Stage::kFirst));
  first.full_dom = upscale_bilinear(first.small_dom, sw, sh, img.width, img.height);
  return first;
}

SegmentationResult segment(const RgbImage& img, const LabelMap& seeds,
                           const SegConfig& cfg, const SegmentObserver& observer) {
  const auto start = Clock::now();
  cfg.validate();
  check_inputs(img, seeds);
  const std::size_t classes = class_count(seeds);

  SegmentationResult out;
  out.seed_pixels = seeds.count_labeled();

  if (const ClassId only = sole_class(seeds); only != kUnlabeled) {
    out.labels = LabelMap(img.width, img.height, classes, only);
    out.stage2_labeled_pixels = img.size() - out.seed_pixels;
    out.timing.total_s = seconds_since(start);
    return out;
  }
  check_tau(cfg, classes);

  // Stage 1: k-NN graph on the reduced image.
  auto t = Clock::now();
  const RgbImage small = downscale_bicubic(img);
  LabelMap small_seeds = downscale_nearest(seeds, small.width, small.height);
  small_seeds.num_classes = classes;
  out.timing.downscale_s = seconds_since(t);

  t = Clock::now();
  KnnBuildInfo knn;
  const SparseDigraph knn_graph = build_knn_digraph(
      image_features(small, cfg.lambda), small_seeds.labels, cfg.k, cfg.sigma, &knn);
  out.effective_k = knn.effective_k;
  out.timing.stage1_graph_s = seconds_since(t);

  t = Clock::now();
  DominationMatrix small_dom = init_domination(small_seeds.labels, classes);
  const StageResult s1 = run_stage(knn_graph, small_dom, cfg.criteria(),
                                   stage_observer(observer, Stage::kFirst));
  out.stage1_iterations = s1.iterations;
  out.stage1_converged = s1.converged;
  out.timing.stage1_propagation_s = seconds_since(t);

  t = Clock::now();
  DominationMatrix dom =
      upscale_bilinear(small_dom, small.width, small.height, img.width, img.height);
  LabelMap labels = seeds;
  labels.num_classes = classes;
  labels = threshold_label(dom, std::move(labels), cfg.tau);
  out.stage1_labeled_pixels = labels.count_labeled() - out.seed_pixels;
  out.timing.upscale_label_s = seconds_since(t);

  // Stage 2: 8-neighbour grid over the pixels still unlabeled. Labeled pixels
  // enter as clamped one-hot rows.
  t = Clock::now();
  std::vector<std::uint8_t> open(labels.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const ClassId l = labels.labels[i];
    if (l == kUnlabeled) {
      open[i] = 1;
      continue;
    }
    auto row = dom.row(i);
    std::fill(row.begin(), row.end(), 0.0);
    row[l - 1u] = 1.0;
    dom.clamped[i] = 1;
  }
  const SparseDigraph grid = build_grid_digraph(image_features(img, cfg.lambda), open,
                                                img.width, img.height, cfg.sigma);
  out.timing.stage2_graph_s = seconds_since(t);

  t = Clock::now();
  const StageResult s2 =
      run_stage(grid, dom, cfg.criteria(), stage_observer(observer, Stage::kSecond));
  out.stage2_iterations = s2.iterations;
  out.stage2_converged = s2.converged;
  out.stage2_labeled_pixels = labels.size() - labels.count_labeled();
  out.labels = argmax_label(dom, std::move(labels));
  out.timing.stage2_propagation_s = seconds_since(t);
  out.timing.total_s = seconds_since(start);
  return out;
}

LabelMap parse_scribbles(const RgbImage& scribbles, Rgb8 background) {
  validate(scribbles);
  const auto to8 = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  std::vector<Rgb8> colours(scribbles.size());
  std::map<Rgb8, ClassId> ids;
  for (std::size_t i = 0; i < scribbles.size(); ++i) {
    const Rgb& p = scribbles.pixels[i];
    colours[i] = {to8(p.r), to8(p.g), to8(p.b)};
    if (colours[i] != background) ids.emplace(colours[i], kUnlabeled);
  }
  if (ids.size() > 255) {
    throw Error(ErrorCode::kTooManyClasses,
                std::to_string(ids.size()) + " scribble colours; at most 255 classes");
  }
  ClassId next = 1;
  for (auto& [colour, id] : ids) id = next++;

  LabelMap labels(scribbles.width, scribbles.height, ids.size());
  for (std::size_t i = 0; i < colours.size(); ++i) {
    if (colours[i] != background) labels.labels[i] = ids.at(colours[i]);
  }
  return labels;
}

Rgb8 dominant_color(const RgbImage& img) {
  validate(img);
  if (img.size() == 0) throw Error(ErrorCode::kDimension, "empty image has no colour");
  std::map<Rgb8, std::size_t> counts;
  for (const Rgb& p : img.pixels) {
    const auto to8 = [](double v) {
      return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    };
    ++counts[{to8(p.r), to8(p.g), to8(p.b)}];
  }
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

Trimap parse_trimap(const GrayImage& trimap) {
  if (trimap.values.size() != trimap.width * trimap.height) {
    throw Error(ErrorCode::kDimension, "trimap buffer does not match its size");
  }
  Trimap out{LabelMap(trimap.width, trimap.height, 2),
             std::vector<std::uint8_t>(trimap.values.size(), 0)};
  for (std::size_t i = 0; i < trimap.values.size(); ++i) {
    switch (trimap.values[i]) {
      case 0:
      case 64:
        out.seeds.labels[i] = kBackgroundClass;
        break;
      case 255:
        out.seeds.labels[i] = kForegroundClass;
        break;
      case 128:
        out.eval_mask[i] = 1;
        break;
      default:
        throw Error(ErrorCode::kFormat,
                    "trimap value " + std::to_string(trimap.values[i]) + " at row " +
                        std::to_string(i / trimap.width) + ", col " +
                        std::to_string(i % trimap.width) +
                        " (expected 0, 64, 128 or 255)");
    }
  }
  return out;
}

}  // namespace lapseg
