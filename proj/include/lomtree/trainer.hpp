#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lomtree/baselines.hpp"
#include "lomtree/dataset.hpp"
#include "lomtree/error.hpp"
#include "lomtree/tree.hpp"

namespace lomtree {

/// Progress of one completed training pass. The error is progressive:
/// each example is predicted before it is trained on, cumulatively over
/// all passes so far.
struct PassSummary {
  uint32_t pass = 0;                 // 0-based
  double cumulative_error = 0.0;
  uint32_t internal_nodes = 0;
  uint64_t swaps = 0;
  uint64_t examples_seen = 0;
};

namespace detail {

/// Predict-then-train over one seeded pass; returns the number of misses.
/// An as-yet-unpredictable model counts as a miss.
template <typename PredictFn, typename TrainFn>
uint64_t run_pass(std::span<const Example> data, uint32_t pass, int64_t shuffle_seed,
                  PredictFn&& predict, TrainFn&& train) {
  uint64_t errors = 0;
  for (const uint32_t idx : pass_order(data.size(), pass, shuffle_seed)) {
    const Example& ex = data[idx];
    try {
      if (predict(ex.features) != ex.label) ++errors;
    } catch (const UntrainedTree&) {
      ++errors;
    } catch (const UntrainedModel&) {
      ++errors;
    }
    train(ex);
  }
  return errors;
}

}  // namespace detail

using LomTreePassCallback = std::function<void(const PassSummary&, const LomTree&)>;

inline LomTree train_lomtree(std::span<const Example> data, const TrainConfig& config,
                             const LomTreePassCallback& on_pass = {}) {
  config.validate();
  LomTree tree(config);
  uint64_t errors = 0;
  for (uint32_t pass = 0; pass < config.passes; ++pass) {
    errors += detail::run_pass(
        data, pass, config.shuffle_seed,
        [&](const SparseVector& x) { return tree.predict(x); },
        [&](const Example& ex) { tree.train_example(ex.features, ex.label); });
    if (on_pass) {
      PassSummary summary;
      summary.pass = pass;
      summary.examples_seen = tree.examples_seen();
      summary.cumulative_error =
          summary.examples_seen ? static_cast<double>(errors) / summary.examples_seen : 0.0;
      summary.internal_nodes = tree.internal_nodes();
      summary.swaps = tree.swaps_performed();
      on_pass(summary, tree);
    }
  }
  return tree;
}

using RtreePassCallback = std::function<void(const PassSummary&, const RandomLabelTree&)>;

inline RandomLabelTree train_rtree(std::span<const Example> data, double step, uint32_t passes,
                                   int64_t shuffle_seed, uint64_t build_seed,
                                   const RtreePassCallback& on_pass = {}) {
  std::vector<uint32_t> labels;
  labels.reserve(data.size());
  for (const Example& ex : data) labels.push_back(ex.label);
  RandomLabelTree rt = RandomLabelTree::build(std::move(labels), build_seed);
  uint64_t errors = 0;
  uint64_t seen = 0;
  for (uint32_t pass = 0; pass < passes; ++pass) {
    errors += detail::run_pass(
        data, pass, shuffle_seed,
        [&](const SparseVector& x) { return rt.predict(x); },
        [&](const Example& ex) { rt.train_example(ex.features, ex.label, step); });
    seen += data.size();
    if (on_pass) {
      PassSummary summary;
      summary.pass = pass;
      summary.examples_seen = seen;
      summary.cumulative_error = seen ? static_cast<double>(errors) / seen : 0.0;
      on_pass(summary, rt);
    }
  }
  return rt;
}

using OaaPassCallback = std::function<void(const PassSummary&, const OaaModel&)>;

inline OaaModel train_oaa(std::span<const Example> data, double step, uint32_t passes,
                          int64_t shuffle_seed, const OaaPassCallback& on_pass = {}) {
  OaaModel model;
  uint64_t errors = 0;
  uint64_t seen = 0;
  for (uint32_t pass = 0; pass < passes; ++pass) {
    errors += detail::run_pass(
        data, pass, shuffle_seed,
        [&](const SparseVector& x) { return model.predict(x); },
        [&](const Example& ex) { model.train_example(ex.features, ex.label, step); });
    seen += data.size();
    if (on_pass) {
      PassSummary summary;
      summary.pass = pass;
      summary.examples_seen = seen;
      summary.cumulative_error = seen ? static_cast<double>(errors) / seen : 0.0;
      on_pass(summary, model);
    }
  }
  return model;
}

}  // namespace lomtree
