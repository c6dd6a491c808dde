#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lomtree/baselines.hpp"
#include "lomtree/error.hpp"
#include "lomtree/metrics.hpp"
#include "lomtree/model_io.hpp"
#include "lomtree/tree.hpp"

namespace lomtree {

/// Evaluation summary of a trained model on a labeled dataset.
struct EvalReport {
  double test_error = 0.0;
  double ci_low = 0.0;   // symmetric binomial 95% interval
  double ci_high = 0.0;
  double per_example_test_seconds = 0.0;  // median of timed repetitions
  double mean_depth = 0.0;
  uint32_t max_depth = 0;
  double tree_entropy_value = 0.0;
  uint64_t examples_evaluated = 0;
  double score_evals_per_example = 0.0;
};

/// Symmetric 95% binomial interval around an error rate via the normal
/// approximation, clamped to [0, 1].
inline std::pair<double, double> binomial_confidence(double error, uint64_t n) {
  if (n == 0) return {0.0, 1.0};
  const double half = 1.96 * std::sqrt(error * (1.0 - error) / static_cast<double>(n));
  return {std::max(0.0, error - half), std::min(1.0, error + half)};
}

namespace detail {

/// Error, eval counters, and routing timing shared by every model kind.
/// Timing covers routing and scoring only; parsing and I/O happen before.
template <typename Model>
void evaluate_core(const Model& model, std::span<const Example> data, uint32_t timing_reps,
                   EvalReport& report) {
  uint64_t errors = 0;
  uint64_t evals = 0;
  for (const Example& ex : data) {
    const Prediction p = model.predict_traced(ex.features);
    if (p.label != ex.label) ++errors;
    evals += p.regressor_evals;
  }
  report.examples_evaluated = data.size();
  report.test_error = data.empty() ? 0.0 : static_cast<double>(errors) / data.size();
  std::tie(report.ci_low, report.ci_high) =
      binomial_confidence(report.test_error, report.examples_evaluated);
  report.score_evals_per_example =
      data.empty() ? 0.0 : static_cast<double>(evals) / data.size();

  timing_reps = std::max<uint32_t>(timing_reps, 3);
  std::vector<double> per_example(timing_reps, 0.0);
  for (uint32_t rep = 0; rep < timing_reps; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    for (const Example& ex : data) {
      volatile uint32_t sink = model.predict(ex.features);
      (void)sink;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    per_example[rep] = data.empty() ? 0.0 : elapsed.count() / data.size();
  }
  std::sort(per_example.begin(), per_example.end());
  report.per_example_test_seconds = per_example[timing_reps / 2];
}

}  // namespace detail

inline EvalReport evaluate(const LomTree& tree, std::span<const Example> data,
                           uint32_t timing_reps = 3) {
  EvalReport report;
  detail::evaluate_core(tree, data, timing_reps, report);
  const DepthStats depth = tree.depth_stats();
  report.mean_depth = depth.mean_leaf_depth;
  report.max_depth = depth.max_depth;
  if (!data.empty()) report.tree_entropy_value = tree_entropy(tree, data).value;
  return report;
}

inline EvalReport evaluate(const RandomLabelTree& rt, std::span<const Example> data,
                           uint32_t timing_reps = 3) {
  EvalReport report;
  detail::evaluate_core(rt, data, timing_reps, report);
  report.max_depth = rt.depth();
  double sum = 0.0;
  for (const auto& [label, path] : rt.paths()) sum += static_cast<double>(path.bits.size());
  report.mean_depth = rt.paths().empty() ? 0.0 : sum / rt.paths().size();
  if (!data.empty()) {
    report.tree_entropy_value =
        partition_entropy(data, [&](const Example& ex) {
          uint32_t v = 0;
          while (!rt.nodes()[v].is_leaf()) {
            v = rt.nodes()[v].regressor.predict(ex.features) > 0.0 ? *rt.nodes()[v].right
                                                                   : *rt.nodes()[v].left;
          }
          return v;
        }).value;
  }
  return report;
}

// A flat scorer is a single-cell partition: depth 0 and the raw label
// entropy of the evaluated data.
inline EvalReport evaluate(const OaaModel& model, std::span<const Example> data,
                           uint32_t timing_reps = 3) {
  EvalReport report;
  detail::evaluate_core(model, data, timing_reps, report);
  if (!data.empty()) report.tree_entropy_value = label_entropy(data);
  return report;
}

inline EvalReport evaluate(const LoadedModel& loaded, std::span<const Example> data,
                           uint32_t timing_reps = 3) {
  return std::visit([&](const auto& m) { return evaluate(m, data, timing_reps); },
                    loaded.model);
}

}  // namespace lomtree
