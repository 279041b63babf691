#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lapseg/image.hpp"
#include "lapseg/pipeline.hpp"

namespace lapseg {

// |{i : mask_i && pred_i != truth_i}| / |{i : mask_i}|. Empty mask throws
// kUndefinedMetric.
double error_rate(const LabelMap& pred, const LabelMap& truth,
                  std::span<const std::uint8_t> mask);

/// Binarized ground truth: foreground iff value > 128. Pixels equal to 128
/// are ambiguous and excluded from evaluation via `valid`.
struct GroundTruth {
  LabelMap labels;
  std::vector<std::uint8_t> valid;
};
GroundTruth parse_truth(const GrayImage& truth);

enum class SeedSource { kTrimap, kScribbles };

struct DatasetItem {
  std::string id;
  std::filesystem::path image;
  std::filesystem::path seeds;
  std::filesystem::path truth;
};

// Matches files by stem across the three directories. Throws kIo listing every
// stem that is missing a partner.
std::vector<DatasetItem> discover_dataset(const std::filesystem::path& images,
                                          const std::filesystem::path& seeds,
                                          const std::filesystem::path& truth);

struct LoadedItem {
  std::string id;
  RgbImage image;
  LabelMap seeds;
  std::vector<std::uint8_t> eval_mask;  // unknown region, minus ambiguous truth
  GroundTruth truth;
};

// Scribble seeds are decoded with the dominant colour as background and each
// scribble class is mapped to the truth class it mostly covers.
LoadedItem load_item(const DatasetItem& item, SeedSource source);

struct BenchRow {
  std::string image_id;
  std::size_t k = 0;
  double sigma = 0.0;
  double omega = 0.0;
  std::string lambda;
  double error_rate = 0.0;
  std::optional<double> error_rate_excluding_former_seeds;
  std::size_t stage1_iterations = 0;
  std::size_t stage2_iterations = 0;
  double wall_time_s = 0.0;  // mean of the segment call over repeats
  double seed_fraction = 0.0;
};

// Segments one item `repeats` times (timing only the segment call).
BenchRow evaluate(const LoadedItem& item, const SegConfig& cfg, std::size_t repeats = 1);

struct BenchReport {
  std::vector<BenchRow> rows;
  double mean_error = 0.0;
  double mean_time_s = 0.0;
  std::vector<BenchRow> best_k_rows;  // filled when a k grid was given
  std::optional<double> mean_best_k_error;
};

BenchReport run_grabcut(std::span<const LoadedItem> items, const SegConfig& cfg,
                        std::span<const std::size_t> k_grid = {},
                        std::size_t repeats = 1);

// {2, ..., 40} followed by {50, 60, ..., 250}.
std::vector<std::size_t> default_k_grid();

// Every nonzero entry is cleared independently with probability p in [0, 0.99].
LabelMap erode_seeds(const LabelMap& seeds, double p, std::uint64_t seed);

struct SensitivityPoint {
  double p = 0.0;
  double mean_error_all = 0.0;             // over all unlabeled pixels
  double mean_error_excluding_seeds = 0.0; // former seed pixels left out
  double mean_seed_fraction = 0.0;
};

// Each (image, trial) draws from its own stream derived from `seed`.
std::vector<SensitivityPoint> seed_sensitivity(std::span<const LoadedItem> items,
                                               std::span<const double> p_grid,
                                               std::size_t trials, const SegConfig& cfg,
                                               std::uint64_t seed);

enum class SweepParam { kK, kSigma, kOmega };
SweepParam parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam param);

struct SweepPoint {
  double value = 0.0;
  double mean_error = 0.0;
  double mean_time_s = 0.0;
};

std::vector<SweepPoint> parameter_sweep(std::span<const LoadedItem> items,
                                        SweepParam param, std::span<const double> grid,
                                        const SegConfig& cfg, std::size_t repeats = 1);

// "A:STEP:B" (inclusive, tolerant to rounding) or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);

std::string bench_csv_header();
std::string to_csv_line(const BenchRow& row);

}  // namespace lapseg
