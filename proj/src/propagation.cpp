#include "lapseg/propagation.hpp"

#include <algorithm>
#include <string>

#include "lapseg/error.hpp"
#include "lapseg/parallel.hpp"

namespace lapseg {
namespace {

// Weighted mean of the out-neighbours' rows of node i, written to `out`.
// Summation follows adjacency order, so the result does not depend on how
// rows are distributed across workers.
void update_row(const SparseDigraph& graph, const DominationMatrix& dom, std::size_t i,
                std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (const Edge& e : graph.out_edges(i)) {
    const auto src = dom.row(e.target);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += e.weight * src[c];
    total += e.weight;
  }
  const double inv = 1.0 / total;
  for (double& v : out) v *= inv;
}

void check_aligned(const SparseDigraph& graph, const DominationMatrix& dom) {
  if (graph.num_nodes() != dom.n) {
    throw Error(ErrorCode::kDimension, "graph has " + std::to_string(graph.num_nodes()) +
                                           " nodes, domination matrix " +
                                           std::to_string(dom.n));
  }
}

double mean_row_max(const DominationMatrix& dom, const std::vector<std::size_t>& rows) {
  double sum = 0.0;
  for (std::size_t i : rows) {
    const auto r = dom.row(i);
    sum += *std::max_element(r.begin(), r.end());
  }
  return sum / static_cast<double>(rows.size());
}

}  // namespace

DominationMatrix init_domination(std::span<const ClassId> labels,
                                 std::size_t num_classes) {
  if (num_classes == 0) throw Error(ErrorCode::kParameter, "class count must be >= 1");
  DominationMatrix dom(labels.size(), num_classes);
  const double balanced = 1.0 / static_cast<double>(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto row = dom.row(i);
    const ClassId label = labels[i];
    if (label == kUnlabeled) {
      std::fill(row.begin(), row.end(), balanced);
    } else {
      if (label > num_classes) {
        throw Error(ErrorCode::kParameter, "label " + std::to_string(label) +
                                               " exceeds class count " +
                                               std::to_string(num_classes));
      }
      row[label - 1u] = 1.0;
      dom.clamped[i] = 1;
    }
  }
  return dom;
}

DominationMatrix propagation_step(const SparseDigraph& graph, const DominationMatrix& dom) {
  check_aligned(graph, dom);
  DominationMatrix next = dom;
  parallel_for(dom.n, 512, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (dom.is_clamped(i) || graph.out_degree(i) == 0) continue;
      update_row(graph, dom, i, next.row(i));
    }
  });
  return next;
}

std::optional<double> avg_max_domination(const DominationMatrix& dom) {
  std::vector<std::size_t> free_rows;
  for (std::size_t i = 0; i < dom.n; ++i) {
    if (!dom.is_clamped(i)) free_rows.push_back(i);
  }
  if (free_rows.empty()) return std::nullopt;
  return mean_row_max(dom, free_rows);
}

void ConvergenceCriteria::validate() const {
  if (check_interval < 1) throw Error(ErrorCode::kParameter, "check interval must be >= 1");
  if (!(omega > 0.0)) throw Error(ErrorCode::kParameter, "omega must be > 0");
  if (max_iterations < 1) throw Error(ErrorCode::kParameter, "max iterations must be >= 1");
}

StageResult run_stage(const SparseDigraph& graph, DominationMatrix& dom,
                      const ConvergenceCriteria& criteria, const StageObserver& observer) {
  criteria.validate();
  check_aligned(graph, dom);

  std::vector<std::size_t> free_rows;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < dom.n; ++i) {
    if (dom.is_clamped(i)) continue;
    free_rows.push_back(i);
    if (graph.out_degree(i) > 0) active.push_back(i);
  }
  StageResult result;
  if (free_rows.empty()) return result;
  result.initial_avg = result.final_avg = mean_row_max(dom, free_rows);
  if (active.empty()) return result;

  const std::size_t classes = dom.num_classes;
  std::vector<double> next(active.size() * classes);
  double previous = result.initial_avg;
  result.converged = false;

  for (std::size_t iteration = 1; iteration <= criteria.max_iterations; ++iteration) {
    parallel_for(active.size(), 256, [&](std::size_t begin, std::size_t end) {
      for (std::size_t a = begin; a < end; ++a) {
        update_row(graph, dom, active[a], {next.data() + a * classes, classes});
      }
    });
    parallel_for(active.size(), 1024, [&](std::size_t begin, std::size_t end) {
      for (std::size_t a = begin; a < end; ++a) {
        std::copy_n(next.data() + a * classes, classes, dom.row(active[a]).data());
      }
    });
    result.iterations = iteration;
    if (observer) observer(iteration, dom);

    if (iteration % criteria.check_interval == 0) {
      const double current = mean_row_max(dom, free_rows);
      result.final_avg = current;
      if (current - previous < criteria.omega) {
        result.converged = true;
        break;
      }
      previous = current;
    }
  }
  if (!result.converged) result.final_avg = mean_row_max(dom, free_rows);
  return result;
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

namespace {

void check_labels(const DominationMatrix& dom, const LabelMap& labels) {
  if (labels.size() != dom.n) {
    throw Error(ErrorCode::kDimension, "label map has " + std::to_string(labels.size()) +
                                           " pixels, domination matrix " +
                                           std::to_string(dom.n) + " rows");
  }
}

}  // namespace

LabelMap threshold_label(const DominationMatrix& dom, LabelMap labels, double tau) {
  check_labels(dom, labels);
  labels.num_classes = std::max(labels.num_classes, dom.num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.labels[i] != kUnlabeled) continue;
    const auto row = dom.row(i);
    const std::size_t best = argmax(row);
    if (row[best] >= tau) labels.labels[i] = static_cast<ClassId>(best + 1);
  }
  return labels;
}

LabelMap argmax_label(const DominationMatrix& dom, LabelMap labels) {
  check_labels(dom, labels);
  labels.num_classes = std::max(labels.num_classes, dom.num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.labels[i] == kUnlabeled) {
      labels.labels[i] = static_cast<ClassId>(argmax(dom.row(i)) + 1);
    }
  }
  return labels;
}

}  // namespace lapseg
