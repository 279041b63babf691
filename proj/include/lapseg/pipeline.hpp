#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "lapseg/domination.hpp"
#include "lapseg/features.hpp"
#include "lapseg/graph.hpp"
#include "lapseg/image.hpp"
#include "lapseg/propagation.hpp"

namespace lapseg {

struct SegConfig {
  std::size_t k = 10;
  double sigma = 0.5;
  double omega = 1e-4;
  LambdaPreset lambda = LambdaPreset::uniform();
  double tau = 0.999;
  std::size_t check_interval = 10;
  std::size_t max_iterations = 100000;

  // Class-independent checks; tau > 1/C is checked once C is known.
  void validate() const;
  ConvergenceCriteria criteria() const { return {check_interval, omega, max_iterations}; }
};

struct PhaseTimings {
  double downscale_s = 0.0;
  double stage1_graph_s = 0.0;
  double stage1_propagation_s = 0.0;
  double upscale_label_s = 0.0;
  double stage2_graph_s = 0.0;
  double stage2_propagation_s = 0.0;
  double total_s = 0.0;
};

struct SegmentationResult {
  LabelMap labels;  // no zeros
  std::size_t stage1_iterations = 0;
  std::size_t stage2_iterations = 0;
  bool stage1_converged = true;
  bool stage2_converged = true;
  // seed_pixels + stage1_labeled_pixels + stage2_labeled_pixels == pixel count
  std::size_t seed_pixels = 0;
  std::size_t stage1_labeled_pixels = 0;
  std::size_t stage2_labeled_pixels = 0;
  std::size_t effective_k = 0;
  PhaseTimings timing;

  double stage1_labeled_fraction() const {
    return labels.size() == 0 ? 0.0
                              : static_cast<double>(stage1_labeled_pixels) /
                                    static_cast<double>(labels.size());
  }
};

/// Intermediate products of the downscaled k-NN stage.
struct FirstStage {
  RgbImage small_image;
  LabelMap small_seeds;
  SparseDigraph graph;
  KnnBuildInfo knn;
  DominationMatrix small_dom;  // converged rows on the small grid
  DominationMatrix full_dom;   // bilinearly enlarged to the input size
  StageResult result;
};

enum class Stage { kFirst, kSecond };
using SegmentObserver =
    std::function<void(Stage, std::size_t iteration, const DominationMatrix&)>;

// Throws kMissingSeeds when `seeds` has no labeled pixel, kDimension when the
// maps disagree in size and kParameter on invalid configuration.
FirstStage run_first_stage(const RgbImage& img, const LabelMap& seeds,
                           const SegConfig& cfg, const SegmentObserver& observer = {});

SegmentationResult segment(const RgbImage& img, const LabelMap& seeds,
                           const SegConfig& cfg, const SegmentObserver& observer = {});

using Rgb8 = std::array<std::uint8_t, 3>;

// Pixels equal to `background` are unlabeled; remaining colours are numbered
// 1..C in ascending (R, G, B) order.
LabelMap parse_scribbles(const RgbImage& scribbles, Rgb8 background);

// Most frequent colour of the image (ties to the lowest colour).
Rgb8 dominant_color(const RgbImage& img);

struct Trimap {
  LabelMap seeds;                      // 1 background, 2 foreground
  std::vector<std::uint8_t> eval_mask; // 1 where the trimap value is 128
};

inline constexpr ClassId kBackgroundClass = 1;
inline constexpr ClassId kForegroundClass = 2;

// 0 and 64 seed the background, 255 the foreground, 128 is unknown. Any other
// value throws kFormat.
Trimap parse_trimap(const GrayImage& trimap);

}  // namespace lapseg
