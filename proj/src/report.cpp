#include "lapseg/report.hpp"

#include <string>

#include "lapseg/error.hpp"

namespace lapseg {

using nlohmann::json;

json to_json(const SegConfig& cfg) {
  return {{"k", cfg.k},
          {"sigma", cfg.sigma},
          {"omega", cfg.omega},
          {"lambda", cfg.lambda.name},
          {"lambda_weights", cfg.lambda.weights},
          {"tau", cfg.tau},
          {"check_interval", cfg.check_interval},
          {"max_iterations", cfg.max_iterations}};
}

json to_json(const SegmentationResult& r) {
  const auto total = static_cast<double>(r.labels.size());
  const auto fraction = [&](std::size_t n) {
    return total > 0 ? static_cast<double>(n) / total : 0.0;
  };
  return {{"width", r.labels.width},
          {"height", r.labels.height},
          {"num_classes", r.labels.num_classes},
          {"class_counts", class_counts(r.labels)},
          {"stage1_iterations", r.stage1_iterations},
          {"stage2_iterations", r.stage2_iterations},
          {"stage1_converged", r.stage1_converged},
          {"stage2_converged", r.stage2_converged},
          {"seed_pixels", r.seed_pixels},
          {"stage1_labeled_pixels", r.stage1_labeled_pixels},
          {"stage2_labeled_pixels", r.stage2_labeled_pixels},
          {"seed_fraction", fraction(r.seed_pixels)},
          {"stage1_labeled_fraction", fraction(r.stage1_labeled_pixels)},
          {"stage2_labeled_fraction", fraction(r.stage2_labeled_pixels)},
          {"effective_k", r.effective_k},
          {"timing_s",
           {{"downscale", r.timing.downscale_s},
            {"stage1_graph", r.timing.stage1_graph_s},
            {"stage1_propagation", r.timing.stage1_propagation_s},
            {"upscale_label", r.timing.upscale_label_s},
            {"stage2_graph", r.timing.stage2_graph_s},
            {"stage2_propagation", r.timing.stage2_propagation_s},
            {"total", r.timing.total_s}}}};
}

json to_json(const NetworkStats& s) {
  // JSON has no infinity; the flag carries it.
  return {{"nodes", s.nodes},
          {"edges", s.edges},
          {"clustering", s.clustering},
          {"efficiency", s.efficiency},
          {"c_rand", s.c_rand},
          {"e_rand", s.e_rand},
          {"swn", s.swn_infinite ? json(nullptr) : json(s.swn)},
          {"swn_infinite", s.swn_infinite},
          {"baseline_samples", s.baseline_samples}};
}

json to_json(const BenchRow& row) {
  json j = {{"image_id", row.image_id},
            {"k", row.k},
            {"sigma", row.sigma},
            {"omega", row.omega},
            {"lambda", row.lambda},
            {"error_rate", row.error_rate},
            {"stage1_iterations", row.stage1_iterations},
            {"stage2_iterations", row.stage2_iterations},
            {"wall_time_s", row.wall_time_s},
            {"seed_fraction", row.seed_fraction}};
  if (row.error_rate_excluding_former_seeds) {
    j["error_rate_excluding_former_seeds"] = *row.error_rate_excluding_former_seeds;
  }
  return j;
}

json to_json(const BenchReport& report) {
  json rows = json::array();
  for (const BenchRow& row : report.rows) rows.push_back(to_json(row));
  json j = {{"rows", rows},
            {"mean_error", report.mean_error},
            {"mean_time_s", report.mean_time_s},
            {"truth_binarization", "foreground iff value > 128; value 128 not evaluated"}};
  if (report.mean_best_k_error) {
    json best = json::array();
    for (const BenchRow& row : report.best_k_rows) best.push_back(to_json(row));
    j["best_k_rows"] = best;
    j["mean_best_k_error"] = *report.mean_best_k_error;
  }
  return j;
}

json to_json(const SensitivityPoint& p) {
  return {{"p", p.p},
          {"mean_error_all", p.mean_error_all},
          {"mean_error_excluding_seeds", p.mean_error_excluding_seeds},
          {"mean_seed_fraction", p.mean_seed_fraction}};
}

json to_json(const SweepPoint& p) {
  return {{"value", p.value}, {"mean_error", p.mean_error}, {"mean_time_s", p.mean_time_s}};
}

std::vector<std::size_t> class_counts(const LabelMap& labels) {
  std::vector<std::size_t> counts(labels.num_classes + 1, 0);
  for (ClassId l : labels.labels) {
    if (l >= counts.size()) counts.resize(l + 1u, 0);
    ++counts[l];
  }
  return counts;
}

void apply_overrides(SegConfig& cfg, const json& overrides) {
  if (overrides.is_null()) return;
  if (!overrides.is_object()) throw Error(ErrorCode::kParameter, "config must be an object");

  const auto count = [&](const char* key) -> std::size_t {
    const json& v = overrides.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw Error(ErrorCode::kParameter, std::string(key) + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
  };
  const auto real = [&](const char* key) {
    const json& v = overrides.at(key);
    if (!v.is_number()) throw Error(ErrorCode::kParameter, std::string(key) + " must be a number");
    return v.get<double>();
  };

  SegConfig next = cfg;
  for (const auto& [key, value] : overrides.items()) {
    if (key == "k") {
      next.k = count("k");
    } else if (key == "sigma") {
      next.sigma = real("sigma");
    } else if (key == "omega") {
      next.omega = real("omega");
    } else if (key == "tau") {
      next.tau = real("tau");
    } else if (key == "check_interval") {
      next.check_interval = count("check_interval");
    } else if (key == "max_iterations") {
      next.max_iterations = count("max_iterations");
    } else if (key == "lambda") {
      if (value.is_string()) {
        next.lambda = LambdaPreset::parse(value.get<std::string>());
      } else if (value.is_array() && value.size() == kNumFeatures) {
        std::string text;
        for (const json& w : value) {
          if (!w.is_number()) throw Error(ErrorCode::kParameter, "lambda weights must be numbers");
          if (!text.empty()) text += ',';
          text += w.dump();
        }
        next.lambda = LambdaPreset::parse(text);
      } else {
        throw Error(ErrorCode::kParameter, "lambda must be a preset name or 9 numbers");
      }
    } else {
      throw Error(ErrorCode::kParameter, "unknown config key '" + key + "'");
    }
  }
  next.validate();
  cfg = next;
}

}  // namespace lapseg
