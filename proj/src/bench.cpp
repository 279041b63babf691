#include "lapseg/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "lapseg/codec.hpp"
#include "lapseg/error.hpp"
#include "lapseg/random.hpp"

namespace lapseg {
namespace fs = std::filesystem;

namespace {

std::string number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::string dims(std::size_t w, std::size_t h) {
  return std::to_string(w) + "x" + std::to_string(h);
}

std::map<std::string, fs::path> files_by_stem(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() || stem.front() == '.') continue;
    if (!out.emplace(stem, entry.path()).second) {
      throw Error(ErrorCode::kIo, "two files share the stem '" + stem + "' in " + dir.string());
    }
  }
  return out;
}

// Maps every scribble class onto the truth class that covers most of its
// pixels (ties to the lower truth class).
LabelMap scribbles_to_truth_classes(const LabelMap& scribbles, const GroundTruth& truth) {
  std::vector<std::array<std::size_t, 3>> votes(scribbles.num_classes + 1, {0, 0, 0});
  for (std::size_t i = 0; i < scribbles.size(); ++i) {
    const ClassId s = scribbles.labels[i];
    if (s == kUnlabeled || truth.valid[i] == 0) continue;
    ++votes[s][truth.labels.labels[i]];
  }
  std::vector<ClassId> target(votes.size(), kUnlabeled);
  for (std::size_t c = 1; c < votes.size(); ++c) {
    target[c] = votes[c][kForegroundClass] > votes[c][kBackgroundClass] ? kForegroundClass
                                                                        : kBackgroundClass;
  }
  LabelMap out(scribbles.width, scribbles.height, 2);
  for (std::size_t i = 0; i < scribbles.size(); ++i) {
    out.labels[i] = target[scribbles.labels[i]];
  }
  return out;
}

double seconds(std::chrono::steady_clock::duration d) {
  return std::chrono::duration<double>(d).count();
}

}  // namespace

double error_rate(const LabelMap& pred, const LabelMap& truth,
                  std::span<const std::uint8_t> mask) {
  if (pred.size() != truth.size() || mask.size() != pred.size()) {
    throw Error(ErrorCode::kDimension, "prediction, truth and mask sizes differ (" +
                                           std::to_string(pred.size()) + ", " +
                                           std::to_string(truth.size()) + ", " +
                                           std::to_string(mask.size()) + ")");
  }
  std::size_t counted = 0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0) continue;
    ++counted;
    wrong += pred.labels[i] != truth.labels[i] ? 1 : 0;
  }
  if (counted == 0) throw Error(ErrorCode::kUndefinedMetric, "evaluation mask is empty");
  return static_cast<double>(wrong) / static_cast<double>(counted);
}

GroundTruth parse_truth(const GrayImage& truth) {
  GroundTruth out{LabelMap(truth.width, truth.height, 2),
                  std::vector<std::uint8_t>(truth.values.size(), 1)};
  for (std::size_t i = 0; i < truth.values.size(); ++i) {
    const std::uint8_t v = truth.values[i];
    out.labels.labels[i] = v > 128 ? kForegroundClass : kBackgroundClass;
    if (v == 128) out.valid[i] = 0;
  }
  return out;
}

std::vector<DatasetItem> discover_dataset(const fs::path& images, const fs::path& seeds,
                                          const fs::path& truth) {
  const auto image_files = files_by_stem(images);
  const auto seed_files = files_by_stem(seeds);
  const auto truth_files = files_by_stem(truth);

  std::set<std::string> stems;
  for (const auto* m : {&image_files, &seed_files, &truth_files}) {
    for (const auto& [stem, path] : *m) stems.insert(stem);
  }
  std::vector<DatasetItem> items;
  std::string missing;
  for (const std::string& stem : stems) {
    const auto img = image_files.find(stem);
    const auto sd = seed_files.find(stem);
    const auto tr = truth_files.find(stem);
    if (img == image_files.end()) missing += "\n  " + (images / stem).string() + ".*";
    if (sd == seed_files.end()) missing += "\n  " + (seeds / stem).string() + ".*";
    if (tr == truth_files.end()) missing += "\n  " + (truth / stem).string() + ".*";
    if (img != image_files.end() && sd != seed_files.end() && tr != truth_files.end()) {
      items.push_back({stem, img->second, sd->second, tr->second});
    }
  }
  if (!missing.empty()) throw Error(ErrorCode::kIo, "unmatched dataset files:" + missing);
  if (items.empty()) throw Error(ErrorCode::kIo, "no images in " + images.string());
  return items;
}

LoadedItem load_item(const DatasetItem& item, SeedSource source) {
  LoadedItem out;
  out.id = item.id;
  out.image = decode_image(read_file(item.image));
  out.truth = parse_truth(decode_gray(read_file(item.truth)));
  const std::size_t w = out.image.width;
  const std::size_t h = out.image.height;
  if (out.truth.labels.width != w || out.truth.labels.height != h) {
    throw Error(ErrorCode::kDimension, item.id + ": truth is " +
                                           dims(out.truth.labels.width,
                                                out.truth.labels.height) +
                                           ", image " + dims(w, h));
  }

  if (source == SeedSource::kTrimap) {
    Trimap tri = parse_trimap(decode_gray(read_file(item.seeds)));
    out.seeds = std::move(tri.seeds);
    out.eval_mask = std::move(tri.eval_mask);
  } else {
    const RgbImage scrib = decode_image(read_file(item.seeds));
    if (scrib.width == w && scrib.height == h) {
      out.seeds = scribbles_to_truth_classes(parse_scribbles(scrib, dominant_color(scrib)),
                                             out.truth);
    }
    out.eval_mask.assign(w * h, 0);
    for (std::size_t i = 0; i < out.seeds.size(); ++i) {
      out.eval_mask[i] = out.seeds.labels[i] == kUnlabeled ? 1 : 0;
    }
  }
  if (out.seeds.width != w || out.seeds.height != h) {
    throw Error(ErrorCode::kDimension, item.id + ": seeds do not match image " + dims(w, h));
  }
  for (std::size_t i = 0; i < out.eval_mask.size(); ++i) {
    if (out.truth.valid[i] == 0) out.eval_mask[i] = 0;
  }
  return out;
}

BenchRow evaluate(const LoadedItem& item, const SegConfig& cfg, std::size_t repeats) {
  if (repeats < 1) throw Error(ErrorCode::kParameter, "repeats must be >= 1");
  BenchRow row;
  row.image_id = item.id;
  row.k = cfg.k;
  row.sigma = cfg.sigma;
  row.omega = cfg.omega;
  row.lambda = cfg.lambda.name;

  SegmentationResult result;
  std::chrono::steady_clock::duration total{};
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    result = segment(item.image, item.seeds, cfg);
    total += std::chrono::steady_clock::now() - start;
  }
  row.error_rate = error_rate(result.labels, item.truth.labels, item.eval_mask);
  row.stage1_iterations = result.stage1_iterations;
  row.stage2_iterations = result.stage2_iterations;
  row.wall_time_s = seconds(total) / static_cast<double>(repeats);
  row.seed_fraction =
      static_cast<double>(result.seed_pixels) / static_cast<double>(item.seeds.size());
  return row;
}

BenchReport run_grabcut(std::span<const LoadedItem> items, const SegConfig& cfg,
                        std::span<const std::size_t> k_grid, std::size_t repeats) {
  if (items.empty()) throw Error(ErrorCode::kParameter, "no dataset items");
  // Items run one after another so that each timing sees the whole machine.
  BenchReport report;
  for (const LoadedItem& item : items) {
    report.rows.push_back(evaluate(item, cfg, repeats));
    report.mean_error += report.rows.back().error_rate;
    report.mean_time_s += report.rows.back().wall_time_s;
  }
  const auto count = static_cast<double>(items.size());
  report.mean_error /= count;
  report.mean_time_s /= count;

  if (!k_grid.empty()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::optional<BenchRow> best;
      for (std::size_t k : k_grid) {
        SegConfig trial = cfg;
        trial.k = k;
        BenchRow row = k == cfg.k ? report.rows[i] : evaluate(items[i], trial, repeats);
        if (!best || row.error_rate < best->error_rate) best = std::move(row);
      }
      sum += best->error_rate;
      report.best_k_rows.push_back(std::move(*best));
    }
    report.mean_best_k_error = sum / count;
  }
  return report;
}

std::vector<std::size_t> default_k_grid() {
  std::vector<std::size_t> grid;
  for (std::size_t k = 2; k <= 40; ++k) grid.push_back(k);
  for (std::size_t k = 50; k <= 250; k += 10) grid.push_back(k);
  return grid;
}

LabelMap erode_seeds(const LabelMap& seeds, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 0.99)) {
    throw Error(ErrorCode::kParameter, "erosion probability must lie in [0, 0.99], got " +
                                           number(p));
  }
  std::mt19937_64 rng(seed);
  LabelMap out = seeds;
  for (ClassId& l : out.labels) {
    if (l != kUnlabeled && uniform_unit(rng) < p) l = kUnlabeled;
  }
  return out;
}

std::vector<SensitivityPoint> seed_sensitivity(std::span<const LoadedItem> items,
                                               std::span<const double> p_grid,
                                               std::size_t trials, const SegConfig& cfg,
                                               std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::kParameter, "trials must be >= 1");
  if (items.empty()) throw Error(ErrorCode::kParameter, "no dataset items");
  std::vector<SensitivityPoint> curve;
  for (double p : p_grid) {
    SensitivityPoint point;
    point.p = p;
    std::size_t runs = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const LoadedItem& item = items[i];
      for (std::size_t t = 0; t < trials; ++t) {
        const LabelMap eroded = erode_seeds(item.seeds, p, derive_seed(seed, i, t));
        const SegmentationResult result = segment(item.image, eroded, cfg);
        std::vector<std::uint8_t> unlabeled(eroded.size(), 0);
        for (std::size_t j = 0; j < eroded.size(); ++j) {
          unlabeled[j] = eroded.labels[j] == kUnlabeled && item.truth.valid[j] != 0;
        }
        point.mean_error_all += error_rate(result.labels, item.truth.labels, unlabeled);
        point.mean_error_excluding_seeds +=
            error_rate(result.labels, item.truth.labels, item.eval_mask);
        point.mean_seed_fraction +=
            static_cast<double>(eroded.count_labeled()) / static_cast<double>(eroded.size());
        ++runs;
      }
    }
    point.mean_error_all /= static_cast<double>(runs);
    point.mean_error_excluding_seeds /= static_cast<double>(runs);
    point.mean_seed_fraction /= static_cast<double>(runs);
    curve.push_back(point);
  }
  return curve;
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "k") return SweepParam::kK;
  if (name == "sigma") return SweepParam::kSigma;
  if (name == "omega") return SweepParam::kOmega;
  throw Error(ErrorCode::kParameter,
              "unknown sweep parameter '" + std::string(name) + "' (k, sigma or omega)");
}

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::kK:
      return "k";
    case SweepParam::kSigma:
      return "sigma";
    case SweepParam::kOmega:
      return "omega";
  }
  return "?";
}

std::vector<SweepPoint> parameter_sweep(std::span<const LoadedItem> items,
                                        SweepParam param, std::span<const double> grid,
                                        const SegConfig& cfg, std::size_t repeats) {
  std::vector<SweepPoint> curve;
  for (double value : grid) {
    SegConfig trial = cfg;
    switch (param) {
      case SweepParam::kK:
        if (!(value >= 1.0) || value != std::floor(value)) {
          throw Error(ErrorCode::kParameter, "k grid values must be positive integers, got " +
                                                 number(value));
        }
        trial.k = static_cast<std::size_t>(value);
        break;
      case SweepParam::kSigma:
        trial.sigma = value;
        break;
      case SweepParam::kOmega:
        trial.omega = value;
        break;
    }
    const BenchReport report = run_grabcut(items, trial, {}, repeats);
    curve.push_back({value, report.mean_error, report.mean_time_s});
  }
  return curve;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto parse = [&](std::string_view token) {
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size() ||
        !std::isfinite(v)) {
      throw Error(ErrorCode::kParameter, "bad grid value '" + std::string(token) +
                                             "' in '" + std::string(text) + "'");
    }
    return v;
  };

  std::vector<double> grid;
  const std::size_t c1 = text.find(':');
  if (c1 != std::string_view::npos) {
    const std::size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
      throw Error(ErrorCode::kParameter, "range grid must be A:STEP:B, got '" +
                                             std::string(text) + "'");
    }
    const double a = parse(text.substr(0, c1));
    const double step = parse(text.substr(c1 + 1, c2 - c1 - 1));
    const double b = parse(text.substr(c2 + 1));
    if (step == 0.0 || (b - a) / step < 0.0) {
      throw Error(ErrorCode::kParameter, "step of '" + std::string(text) +
                                             "' does not lead from A to B");
    }
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) grid.push_back(a + static_cast<double>(i) * step);
    return grid;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    grid.push_back(parse(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return grid;
}

std::string bench_csv_header() {
  return "image_id,k,sigma,omega,lambda,error_rate,error_rate_excluding_former_seeds,"
         "stage1_iterations,stage2_iterations,wall_time_s,seed_fraction";
}

std::string to_csv_line(const BenchRow& row) {
  const auto quoted = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::string line = quoted(row.image_id) + "," + std::to_string(row.k) + "," +
                     number(row.sigma) + "," + number(row.omega) + "," +
                     quoted(row.lambda) + "," + number(row.error_rate) + ",";
  if (row.error_rate_excluding_former_seeds) {
    line += number(*row.error_rate_excluding_former_seeds);
  }
  line += "," + std::to_string(row.stage1_iterations) + "," +
          std::to_string(row.stage2_iterations) + "," + number(row.wall_time_s) + "," +
          number(row.seed_fraction);
  return line;
}

}  // namespace lapseg
