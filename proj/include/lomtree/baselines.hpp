#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lomtree/dataset.hpp"
#include "lomtree/error.hpp"
#include "lomtree/linear_regressor.hpp"
#include "lomtree/sparse_vector.hpp"
#include "lomtree/tree.hpp"

namespace lomtree {

/// Balanced label tree with a fixed seeded random label-to-leaf assignment.
/// The structure never changes after construction; only the per-node
/// regressors learn.
class RandomLabelTree {
public:
  struct Node {
    std::optional<uint32_t> left;   // both set (internal) or both empty (leaf)
    std::optional<uint32_t> right;
    uint32_t leaf_label = 0;        // meaningful for leaves only
    LinearRegressor regressor;      // used at internal nodes only

    bool is_leaf() const { return !left.has_value(); }
  };

  /// Path from the root to a label's leaf; bit 1 steps right.
  struct LeafPath {
    std::vector<bool> bits;
  };

  /// Assigns a seeded random permutation of the labels to the leaves of a
  /// complete binary tree (leaf depths differ by at most one).
  static RandomLabelTree build(std::vector<uint32_t> labels, uint64_t seed) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.size() < 2) {
      throw TooFewClasses("a label tree needs at least 2 distinct classes");
    }
    detail::fisher_yates(labels, seed);

    RandomLabelTree rt;
    std::vector<bool> path;
    rt.build_rec(labels, 0, labels.size(), path);
    return rt;
  }

  static RandomLabelTree from_parts(std::vector<Node> nodes,
                                    std::map<uint32_t, LeafPath> paths) {
    RandomLabelTree rt;
    rt.nodes_ = std::move(nodes);
    rt.paths_ = std::move(paths);
    return rt;
  }

  /// Trains every regressor on the label's root-to-leaf path: the target is
  /// +1 where the path steps right and -1 where it steps left.
  void train_example(const SparseVector& x, uint32_t label, double step) {
    auto it = paths_.find(label);
    if (it == paths_.end()) {
      throw UnknownLabel("label " + std::to_string(label) + " is not in the tree");
    }
    uint32_t v = 0;
    for (const bool right : it->second.bits) {
      nodes_[v].regressor.update(x, right ? 1.0 : -1.0, step);
      v = right ? *nodes_[v].right : *nodes_[v].left;
    }
  }

  uint32_t predict(const SparseVector& x) const { return predict_traced(x).label; }

  Prediction predict_traced(const SparseVector& x) const {
    Prediction out;
    uint32_t v = 0;
    while (!nodes_[v].is_leaf()) {
      const double score = nodes_[v].regressor.predict(x);
      ++out.regressor_evals;
      ++out.depth;
      v = score > 0.0 ? *nodes_[v].right : *nodes_[v].left;
    }
    out.label = nodes_[v].leaf_label;
    return out;
  }

  uint32_t depth() const {
    uint32_t d = 0;
    for (const auto& [label, path] : paths_) {
      d = std::max(d, static_cast<uint32_t>(path.bits.size()));
    }
    return d;
  }

  uint32_t path_length(uint32_t label) const {
    auto it = paths_.find(label);
    if (it == paths_.end()) {
      throw UnknownLabel("label " + std::to_string(label) + " is not in the tree");
    }
    return static_cast<uint32_t>(it->second.bits.size());
  }

  size_t num_labels() const { return paths_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::map<uint32_t, LeafPath>& paths() const { return paths_; }

private:
  RandomLabelTree() = default;

  // Left subtree takes the ceiling half, which keeps leaf depths within one.
  uint32_t build_rec(const std::vector<uint32_t>& labels, size_t lo, size_t hi,
                     std::vector<bool>& path) {
    const uint32_t id = static_cast<uint32_t>(nodes_.size());
    nodes_.emplace_back();
    if (hi - lo == 1) {
      nodes_[id].leaf_label = labels[lo];
      paths_[labels[lo]] = LeafPath{path};
      return id;
    }
    const size_t mid = lo + (hi - lo + 1) / 2;
    path.push_back(false);
    const uint32_t left = build_rec(labels, lo, mid, path);
    path.back() = true;
    const uint32_t right = build_rec(labels, mid, hi, path);
    path.pop_back();
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  std::vector<Node> nodes_;
  std::map<uint32_t, LeafPath> paths_;
};

/// One-against-all baseline: one regressor per observed class, trained
/// toward +1 for its class and -1 for every other example.
class OaaModel {
public:
  OaaModel() = default;

  void train_example(const SparseVector& x, uint32_t label, double step) {
    regressors_.try_emplace(label);
    for (auto& [cls, reg] : regressors_) {
      reg.update(x, cls == label ? 1.0 : -1.0, step);
    }
  }

  uint32_t predict(const SparseVector& x) const { return predict_traced(x).label; }

  /// Scores every class; the smallest id wins ties. Cost is exactly one
  /// regressor evaluation per known class.
  Prediction predict_traced(const SparseVector& x) const {
    if (regressors_.empty()) {
      throw UntrainedModel("one-against-all model has no trained classes");
    }
    Prediction out;
    double best = 0.0;
    bool first = true;
    for (const auto& [cls, reg] : regressors_) {
      const double score = reg.predict(x);
      ++out.regressor_evals;
      if (first || score > best) {
        best = score;
        out.label = cls;
        first = false;
      }
    }
    return out;
  }

  size_t num_classes() const { return regressors_.size(); }
  const std::map<uint32_t, LinearRegressor>& regressors() const { return regressors_; }

  static OaaModel from_parts(std::map<uint32_t, LinearRegressor> regressors) {
    OaaModel m;
    m.regressors_ = std::move(regressors);
    return m;
  }

private:
  std::map<uint32_t, LinearRegressor> regressors_;
};

}  // namespace lomtree
