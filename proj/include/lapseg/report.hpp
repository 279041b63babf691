#pragma once

#include <json.hpp>

#include "lapseg/bench.hpp"
#include "lapseg/netmetrics.hpp"
#include "lapseg/pipeline.hpp"

namespace lapseg {

nlohmann::json to_json(const SegConfig& cfg);
nlohmann::json to_json(const SegmentationResult& result);
nlohmann::json to_json(const NetworkStats& stats);
nlohmann::json to_json(const BenchRow& row);
nlohmann::json to_json(const BenchReport& report);
nlohmann::json to_json(const SensitivityPoint& point);
nlohmann::json to_json(const SweepPoint& point);

// Per-class pixel counts, index 0 = unlabeled.
std::vector<std::size_t> class_counts(const LabelMap& labels);

// Applies the recognised keys of `overrides` (k, sigma, omega, lambda, tau,
// check_interval, max_iterations) to `cfg`; throws kParameter on bad values.
void apply_overrides(SegConfig& cfg, const nlohmann::json& overrides);

}  // namespace lapseg
