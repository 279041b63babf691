#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "lapseg/domination.hpp"
#include "lapseg/graph.hpp"
#include "lapseg/image.hpp"

namespace lapseg {

// Labeled entries become one-hot clamped rows, unlabeled ones 1/C each.
DominationMatrix init_domination(std::span<const ClassId> labels,
                                 std::size_t num_classes);

// One synchronous update: every unclamped node with out-edges becomes the
// W-weighted mean of its out-neighbours' rows in `dom`. Other rows are copied.
DominationMatrix propagation_step(const SparseDigraph& graph,
                                  const DominationMatrix& dom);

// Mean over unclamped rows of the row maximum; nullopt when every row is
// clamped (nothing left to propagate).
std::optional<double> avg_max_domination(const DominationMatrix& dom);

struct ConvergenceCriteria {
  std::size_t check_interval = 10;
  double omega = 1e-4;
  std::size_t max_iterations = 100000;

  void validate() const;
};

struct StageResult {
  std::size_t iterations = 0;
  bool converged = true;
  double initial_avg = 0.0;
  double final_avg = 0.0;
};

// Called after every iteration with the 1-based iteration number.
using StageObserver = std::function<void(std::size_t, const DominationMatrix&)>;

// Repeats propagation_step in place. Every check_interval iterations the
// average maximum domination is compared with the previous checkpoint
// (iteration 0 being the first) and the loop stops once
// current - previous < omega, or at max_iterations (converged = false).
StageResult run_stage(const SparseDigraph& graph, DominationMatrix& dom,
                      const ConvergenceCriteria& criteria,
                      const StageObserver& observer = {});

// Unlabeled pixels whose row maximum is >= tau take the argmax class.
LabelMap threshold_label(const DominationMatrix& dom, LabelMap labels, double tau);

// Every remaining unlabeled pixel takes its argmax class (lowest index on ties).
LabelMap argmax_label(const DominationMatrix& dom, LabelMap labels);

// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> row);

}  // namespace lapseg
