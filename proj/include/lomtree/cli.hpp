#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lomtree/dataset.hpp"
#include "lomtree/error.hpp"
#include "lomtree/evaluation.hpp"
#include "lomtree/metrics.hpp"
#include "lomtree/model_io.hpp"
#include "lomtree/sweep.hpp"
#include "lomtree/trainer.hpp"

namespace lomtree::cli {

// Stable exit codes: 0 success, 2 input error, 3 numeric divergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDivergence = 3;

struct TrainOptions {
  std::string algo = "lomtree";
  std::string data_path;
  std::string model_path;  // optional; empty means do not save
  double step = 0.5;
  uint32_t passes = 1;
  std::optional<uint32_t> max_nodes;  // lomtree default: one less than the class count
  double swap_resistance = 4.0;
  uint64_t seed = 42;
  bool no_shuffle = false;
};

struct EvalOptions {
  std::string model_path;
  std::string data_path;
  bool json = false;
  uint32_t timing_reps = 3;
};

struct SweepOptions {
  std::string algo = "lomtree";
  std::string data_path;
  std::string model_path;  // optional; retrains the winner and saves it
  std::vector<double> grid_steps;        // empty selects the default grid
  std::vector<uint32_t> grid_max_nodes;  // empty selects the default grid
  std::vector<double> grid_rs;           // empty selects the default grid
  uint32_t passes = 20;
  uint64_t seed = 42;
  bool no_shuffle = false;
  bool json = false;
  size_t threads = 0;  // 0 defers to LOMTREE_THREADS, then hardware size
};

namespace detail {

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::optional<ModelKind> parse_algo(const std::string& name) {
  if (name == "lomtree") return ModelKind::lomtree;
  if (name == "rtree") return ModelKind::rtree;
  if (name == "oaa") return ModelKind::oaa;
  return std::nullopt;
}

inline int map_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  if (dynamic_cast<const NonFiniteUpdate*>(&e)) return kExitDivergence;
  if (dynamic_cast<const MalformedRecord*>(&e) || dynamic_cast<const TooFewExamples*>(&e) ||
      dynamic_cast<const TooFewClasses*>(&e) || dynamic_cast<const IoError*>(&e) ||
      dynamic_cast<const ModelFormatError*>(&e) || dynamic_cast<const InvalidConfig*>(&e) ||
      dynamic_cast<const UnknownLabel*>(&e)) {
    return kExitInputError;
  }
  return kExitFailure;
}

inline size_t resolve_threads(size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LOMTREE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<size_t>(v);
  }
  return 0;  // run_sweep falls back to hardware concurrency
}

inline void print_pass(std::ostream& out, const PassSummary& s) {
  out << "pass=" << (s.pass + 1) << " cumulative_train_error=" << fmt(s.cumulative_error)
      << " internal_nodes=" << s.internal_nodes << " swaps=" << s.swaps << "\n";
}

}  // namespace detail

inline int run_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const auto algo = detail::parse_algo(opt.algo);
    if (!algo) throw InvalidConfig("unknown algorithm \"" + opt.algo + "\"");
    const std::vector<Example> data = load_dataset(opt.data_path);
    if (data.empty()) throw TooFewExamples("no records in " + opt.data_path);
    const DatasetMeta meta = summarize(data);
    const int64_t shuffle_seed =
        opt.no_shuffle ? kNoShuffleSeed : static_cast<int64_t>(opt.seed);

    out << "algo=" << opt.algo << " examples=" << meta.num_examples
        << " classes=" << meta.num_classes << " dimension=" << meta.dimension << "\n";

    TrainConfig cfg;
    cfg.step = opt.step;
    cfg.passes = opt.passes;
    cfg.swap_resistance = opt.swap_resistance;
    cfg.shuffle_seed = shuffle_seed;

    switch (*algo) {
      case ModelKind::lomtree: {
        cfg.max_internal_nodes =
            opt.max_nodes.value_or(meta.num_classes > 1 ? meta.num_classes - 1 : 1);
        out << "max_nodes=" << cfg.max_internal_nodes
            << " swap_resistance=" << detail::fmt(cfg.swap_resistance)
            << " step=" << detail::fmt(cfg.step) << " passes=" << cfg.passes << "\n";
        const LomTree tree = train_lomtree(
            data, cfg, [&](const PassSummary& s, const LomTree&) { detail::print_pass(out, s); });
        if (!opt.model_path.empty()) {
          save_model(opt.model_path, tree);
          out << "model=" << opt.model_path << "\n";
        }
        break;
      }
      case ModelKind::rtree: {
        cfg.max_internal_nodes = 1;  // config echo only; the structure is fixed
        const RandomLabelTree rt = train_rtree(
            data, opt.step, opt.passes, shuffle_seed, opt.seed,
            [&](const PassSummary& s, const RandomLabelTree&) { detail::print_pass(out, s); });
        if (!opt.model_path.empty()) {
          save_model(opt.model_path, rt, cfg);
          out << "model=" << opt.model_path << "\n";
        }
        break;
      }
      case ModelKind::oaa: {
        cfg.max_internal_nodes = 1;
        const OaaModel model = train_oaa(
            data, opt.step, opt.passes, shuffle_seed,
            [&](const PassSummary& s, const OaaModel&) { detail::print_pass(out, s); });
        if (!opt.model_path.empty()) {
          save_model(opt.model_path, model, cfg);
          out << "model=" << opt.model_path << "\n";
        }
        break;
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::map_error(e, err);
  }
}

inline int run_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const LoadedModel model = load_model(opt.model_path);
    const std::vector<Example> data = load_dataset(opt.data_path);
    if (data.empty()) throw TooFewExamples("no records in " + opt.data_path);
    const EvalReport report = evaluate(model, data, opt.timing_reps);

    // Splitting-quality of the nodes nearest the root, on the eval data.
    std::vector<std::pair<NodeId, double>> split_scores;
    if (const auto* tree = std::get_if<LomTree>(&model.model)) {
      const NodeId root = tree->root();
      std::vector<std::pair<NodeId, uint32_t>> frontier{{root, 0}};
      while (!frontier.empty()) {
        const auto [id, depth] = frontier.back();
        frontier.pop_back();
        if (tree->node(id).is_leaf() || depth > 2) continue;
        try {
          split_scores.emplace_back(id, objective_j(estimate_split_stats(*tree, id, data)));
        } catch (const NoExamplesReachNode&) {
        }
        frontier.emplace_back(*tree->node(id).left, depth + 1);
        frontier.emplace_back(*tree->node(id).right, depth + 1);
      }
      std::sort(split_scores.begin(), split_scores.end());
    }

    if (opt.json) {
      nlohmann::json j{{"model_kind", model_kind_name(model.kind)},
                       {"test_error", report.test_error},
                       {"ci_low", report.ci_low},
                       {"ci_high", report.ci_high},
                       {"per_example_test_seconds", report.per_example_test_seconds},
                       {"mean_depth", report.mean_depth},
                       {"max_depth", report.max_depth},
                       {"tree_entropy", report.tree_entropy_value},
                       {"examples_evaluated", report.examples_evaluated},
                       {"score_evals_per_example", report.score_evals_per_example}};
      for (const auto& [id, score] : split_scores) {
        j["split_j"][std::to_string(id)] = score;
      }
      out << j.dump() << "\n";
    } else {
      out << "model_kind=" << model_kind_name(model.kind) << "\n"
          << "test_error=" << detail::fmt(report.test_error) << "\n"
          << "ci_low=" << detail::fmt(report.ci_low) << "\n"
          << "ci_high=" << detail::fmt(report.ci_high) << "\n"
          << "per_example_test_seconds=" << detail::fmt(report.per_example_test_seconds) << "\n"
          << "mean_depth=" << detail::fmt(report.mean_depth) << "\n"
          << "max_depth=" << report.max_depth << "\n"
          << "tree_entropy=" << detail::fmt(report.tree_entropy_value) << "\n"
          << "examples_evaluated=" << report.examples_evaluated << "\n"
          << "score_evals_per_example=" << detail::fmt(report.score_evals_per_example) << "\n";
      for (const auto& [id, score] : split_scores) {
        out << "split_j_node" << id << "=" << detail::fmt(score) << "\n";
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::map_error(e, err);
  }
}

inline int run_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const auto algo = detail::parse_algo(opt.algo);
    if (!algo) throw InvalidConfig("unknown algorithm \"" + opt.algo + "\"");
    const std::vector<Example> data = load_dataset(opt.data_path);
    const DatasetMeta meta = summarize(data);
    const DatasetSplit split = split_dataset(data, opt.seed);
    if (split.validation.empty()) {
      throw TooFewExamples("validation split is empty; provide more data");
    }

    SweepGrid grid = SweepGrid::defaults_for(meta.num_classes);
    if (!opt.grid_steps.empty()) grid.steps = opt.grid_steps;
    if (!opt.grid_max_nodes.empty()) grid.max_nodes = opt.grid_max_nodes;
    if (!opt.grid_rs.empty()) grid.swap_resistances = opt.grid_rs;
    grid.max_passes = opt.passes;

    const SweepOutcome outcome =
        run_sweep(*algo, split.train, split.validation, grid, opt.seed, !opt.no_shuffle,
                  detail::resolve_threads(opt.threads));

    const auto entry_json = [&](const SweepEntry& e) {
      nlohmann::json j{{"step", e.step},
                       {"passes", e.best_passes},
                       {"validation_error", e.diverged ? -1.0 : e.validation_error},
                       {"diverged", e.diverged}};
      if (*algo == ModelKind::lomtree) {
        j["max_nodes"] = e.max_nodes;
        j["swap_resistance"] = e.swap_resistance;
      }
      return j;
    };

    if (opt.json) {
      nlohmann::json j;
      j["algo"] = opt.algo;
      j["train_examples"] = split.train.size();
      j["validation_examples"] = split.validation.size();
      j["winner"] = entry_json(outcome.winner());
      j["ranked"] = nlohmann::json::array();
      for (const SweepEntry& e : outcome.ranked) j["ranked"].push_back(entry_json(e));
      out << j.dump() << "\n";
    } else {
      out << "algo=" << opt.algo << " train_examples=" << split.train.size()
          << " validation_examples=" << split.validation.size()
          << " grid_points=" << outcome.ranked.size() << "\n";
      size_t rank = 1;
      for (const SweepEntry& e : outcome.ranked) {
        out << "rank=" << rank++ << " step=" << detail::fmt(e.step);
        if (*algo == ModelKind::lomtree) {
          out << " max_nodes=" << e.max_nodes
              << " swap_resistance=" << detail::fmt(e.swap_resistance);
        }
        if (e.diverged) {
          out << " diverged=1\n";
        } else {
          out << " passes=" << e.best_passes
              << " validation_error=" << detail::fmt(e.validation_error) << "\n";
        }
      }
      const SweepEntry& w = outcome.winner();
      out << "winner step=" << detail::fmt(w.step);
      if (*algo == ModelKind::lomtree) {
        out << " max_nodes=" << w.max_nodes
            << " swap_resistance=" << detail::fmt(w.swap_resistance);
      }
      out << " passes=" << w.best_passes
          << " validation_error=" << detail::fmt(w.validation_error) << "\n";
    }

    if (!opt.model_path.empty() && !outcome.winner().diverged) {
      const SweepEntry& w = outcome.winner();
      const int64_t shuffle_seed =
          opt.no_shuffle ? kNoShuffleSeed : static_cast<int64_t>(opt.seed);
      TrainConfig cfg;
      cfg.step = w.step;
      cfg.passes = std::max<uint32_t>(1, w.best_passes);
      cfg.swap_resistance = w.swap_resistance > 0 ? w.swap_resistance : 4.0;
      cfg.shuffle_seed = shuffle_seed;
      switch (*algo) {
        case ModelKind::lomtree:
          cfg.max_internal_nodes = w.max_nodes;
          save_model(opt.model_path, train_lomtree(split.train, cfg));
          break;
        case ModelKind::rtree:
          cfg.max_internal_nodes = 1;
          save_model(opt.model_path,
                     train_rtree(split.train, w.step, cfg.passes, shuffle_seed, opt.seed), cfg);
          break;
        case ModelKind::oaa:
          cfg.max_internal_nodes = 1;
          save_model(opt.model_path, train_oaa(split.train, w.step, cfg.passes, shuffle_seed),
                     cfg);
          break;
      }
      out << "model=" << opt.model_path << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::map_error(e, err);
  }
}

}  // namespace lomtree::cli
