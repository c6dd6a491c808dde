#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include "lomtree/error.hpp"
#include "lomtree/model_io.hpp"
#include "lomtree/trainer.hpp"

namespace lomtree {

/// Hyperparameter grid. The defaults follow the standard tuning sets for
/// this family of learners: step sizes {0.25,...,8}, split budgets
/// {k-1, 2k-1, ..., 64k-1}, swap resistances {4, 8, ..., 256}, up to 20
/// passes; tree-only axes collapse for flat models.
struct SweepGrid {
  std::vector<double> steps{0.25, 0.5, 0.75, 1.0, 2.0, 4.0, 8.0};
  std::vector<uint32_t> max_nodes;
  std::vector<double> swap_resistances{4, 8, 16, 32, 64, 128, 256};
  uint32_t max_passes = 20;

  static SweepGrid defaults_for(uint32_t num_classes) {
    SweepGrid grid;
    for (uint32_t mult = 1; mult <= 64; mult *= 2) {
      grid.max_nodes.push_back(mult * num_classes - 1);
    }
    return grid;
  }
};

struct SweepEntry {
  double step = 0.0;
  uint32_t max_nodes = 0;        // 0 for flat models
  double swap_resistance = 0.0;  // 0 for flat models
  uint32_t best_passes = 0;      // pass count achieving the best validation error
  double validation_error = std::numeric_limits<double>::infinity();
  bool diverged = false;
};

struct SweepOutcome {
  std::vector<SweepEntry> ranked;  // best first
  const SweepEntry& winner() const { return ranked.front(); }
};

namespace detail {

template <typename Model>
double validation_error(const Model& model, std::span<const Example> data) {
  uint64_t errors = 0;
  for (const Example& ex : data) {
    try {
      if (model.predict(ex.features) != ex.label) ++errors;
    } catch (const UntrainedTree&) {
      ++errors;
    } catch (const UntrainedModel&) {
      ++errors;
    }
  }
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

inline bool sweep_order(const SweepEntry& a, const SweepEntry& b) {
  // Minimize validation error; break ties toward the cheaper model.
  if (a.validation_error != b.validation_error) return a.validation_error < b.validation_error;
  if (a.max_nodes != b.max_nodes) return a.max_nodes < b.max_nodes;
  if (a.step != b.step) return a.step < b.step;
  if (a.swap_resistance != b.swap_resistance) return a.swap_resistance < b.swap_resistance;
  return a.best_passes < b.best_passes;
}

}  // namespace detail

/// Grid-searches the given algorithm, training each grid point on `train`
/// and scoring validation error after every pass; the entry keeps its best
/// pass count. A diverging grid point (non-finite update) is kept in the
/// table, ranked last. Grid points run concurrently up to `threads`.
inline SweepOutcome run_sweep(ModelKind algo, std::span<const Example> train,
                              std::span<const Example> validation, const SweepGrid& grid,
                              uint64_t seed, bool shuffle, size_t threads = 0) {
  if (validation.empty()) throw TooFewExamples("sweep needs a nonempty validation split");
  if (train.empty()) throw TooFewExamples("sweep needs a nonempty training split");
  if (grid.steps.empty() || grid.max_passes < 1) throw InvalidConfig("empty sweep grid");

  std::vector<SweepEntry> entries;
  if (algo == ModelKind::lomtree) {
    if (grid.max_nodes.empty() || grid.swap_resistances.empty()) {
      throw InvalidConfig("lomtree sweep needs max_nodes and swap_resistance values");
    }
    for (const double step : grid.steps) {
      for (const uint32_t nodes : grid.max_nodes) {
        for (const double rs : grid.swap_resistances) {
          SweepEntry e;
          e.step = step;
          e.max_nodes = nodes;
          e.swap_resistance = rs;
          entries.push_back(e);
        }
      }
    }
  } else {
    for (const double step : grid.steps) {
      SweepEntry e;
      e.step = step;
      entries.push_back(e);
    }
  }

  const int64_t shuffle_seed = shuffle ? static_cast<int64_t>(seed) : kNoShuffleSeed;
  const auto run_point = [&](SweepEntry& entry) {
    double best = std::numeric_limits<double>::infinity();
    uint32_t best_pass = 0;
    const auto track = [&](const PassSummary& summary, const auto& model) {
      const double err = detail::validation_error(model, validation);
      if (err < best) {
        best = err;
        best_pass = summary.pass + 1;
      }
    };
    try {
      switch (algo) {
        case ModelKind::lomtree: {
          TrainConfig cfg;
          cfg.max_internal_nodes = entry.max_nodes;
          cfg.swap_resistance = entry.swap_resistance;
          cfg.step = entry.step;
          cfg.passes = grid.max_passes;
          cfg.shuffle_seed = shuffle_seed;
          train_lomtree(train, cfg, track);
          break;
        }
        case ModelKind::rtree:
          train_rtree(train, entry.step, grid.max_passes, shuffle_seed, seed, track);
          break;
        case ModelKind::oaa:
          train_oaa(train, entry.step, grid.max_passes, shuffle_seed, track);
          break;
      }
      entry.validation_error = best;
      entry.best_passes = best_pass;
    } catch (const NonFiniteUpdate&) {
      entry.diverged = true;
      entry.validation_error = std::numeric_limits<double>::infinity();
      entry.best_passes = 0;
    }
  };

  size_t worker_count = threads > 0 ? threads : std::thread::hardware_concurrency();
  worker_count = std::max<size_t>(1, std::min(worker_count, entries.size()));
  if (worker_count == 1) {
    for (SweepEntry& e : entries) run_point(e);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (size_t w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= entries.size()) return;
          try {
            run_point(entries[i]);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();
    if (failed) std::rethrow_exception(failure);
  }

  std::sort(entries.begin(), entries.end(), detail::sweep_order);
  return SweepOutcome{std::move(entries)};
}

}  // namespace lomtree
