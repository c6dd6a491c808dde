#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "lomtree/dataset.hpp"
#include "lomtree/error.hpp"
#include "lomtree/linear_regressor.hpp"
#include "lomtree/sparse_vector.hpp"

namespace lomtree {

using NodeId = uint32_t;

/// Hyperparameters of one online tree training run.
struct TrainConfig {
  uint32_t max_internal_nodes = 1;  // T: split budget; the arena holds 2T+1 nodes
  double swap_resistance = 4.0;     // R_S: reluctance to recycle orphan leaves
  double step = 0.5;                // constant SGD learning rate
  uint32_t passes = 1;
  int64_t shuffle_seed = kNoShuffleSeed;

  void validate() const {
    if (max_internal_nodes < 1) throw InvalidConfig("max_internal_nodes must be >= 1");
    if (!(swap_resistance > 0.0)) throw InvalidConfig("swap_resistance must be > 0");
    if (!(step > 0.0)) throw InvalidConfig("step must be > 0");
    if (passes < 1) throw InvalidConfig("passes must be >= 1");
  }
};

/// Lazily created per-class accumulators held at every node.
struct ClassStats {
  double score_sum = 0.0;    // running sum of post-update scores for this class
  uint64_t arrivals = 0;     // examples of this class that reached the node
  uint64_t trained = 0;      // examples of this class the regressor trained on
  double mean_score = 0.0;   // score_sum / trained, 0 while trained == 0
};

/// Node-level state driving routing, splitting, and recycling decisions.
struct NodeStats {
  std::unordered_map<uint32_t, ClassStats> per_class;
  double score_sum_total = 0.0;   // sum of score_sum over classes
  uint64_t trained_total = 0;     // sum of trained over classes
  double mean_score_total = 0.0;  // score_sum_total / trained_total, 0 while 0
  uint64_t min_leaf_count = 0;    // smallest per-leaf arrival count in this subtree
  uint64_t arrivals_total = 0;
  uint32_t majority_label = 0;    // argmax of arrivals; smallest id wins ties
  uint64_t majority_count = 0;

  void reset() {
    per_class.clear();
    score_sum_total = 0.0;
    trained_total = 0;
    mean_score_total = 0.0;
    min_leaf_count = 0;
    arrivals_total = 0;
    majority_label = 0;
    majority_count = 0;
  }

  /// Counts an arrival of `label`, keeping the incremental majority correct.
  void record_arrival(uint32_t label) {
    ClassStats& cs = per_class[label];
    ++cs.arrivals;
    ++arrivals_total;
    if (cs.arrivals > majority_count ||
        (cs.arrivals == majority_count && label < majority_label)) {
      majority_count = cs.arrivals;
      majority_label = label;
    }
  }

  size_t distinct_labels() const { return per_class.size(); }
};

struct TreeNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  std::optional<NodeId> left;   // left and right are both set or both empty
  std::optional<NodeId> right;
  LinearRegressor regressor;
  NodeStats stats;

  bool is_leaf() const { return !left.has_value(); }
};

struct Prediction {
  uint32_t label = 0;
  uint32_t regressor_evals = 0;  // internal nodes visited on the path
  uint32_t depth = 0;
};

struct DepthStats {
  uint32_t max_depth = 0;
  double mean_leaf_depth = 0.0;  // weighted by per-leaf arrival mass
};

/// Online multiclass label tree. Nodes live in a preallocated arena so that
/// splitting and orphan recycling relink identifiers without allocation.
/// Training is single-threaded; a tree that is no longer being trained can
/// be shared read-only for concurrent prediction.
class LomTree {
public:
  explicit LomTree(TrainConfig config) : config_(config) {
    config_.validate();
    nodes_.reserve(size_t{2} * config_.max_internal_nodes + 1);
    allocate_node();  // root
    recycle_counts_.assign(nodes_.capacity(), 0);
  }

  /// Rebuilds a tree from persisted or hand-assembled parts. Links are
  /// validated; per-class maps may be empty (digest-only nodes predict but
  /// carry no class history).
  static LomTree from_parts(TrainConfig config, std::vector<TreeNode> nodes, NodeId root) {
    config.validate();
    if (nodes.empty()) throw InvalidConfig("a tree needs at least one node");
    LomTree tree(config);
    tree.nodes_ = std::move(nodes);
    tree.root_ = root;
    if (tree.nodes_.capacity() < size_t{2} * config.max_internal_nodes + 1) {
      tree.nodes_.reserve(size_t{2} * config.max_internal_nodes + 1);
    }
    tree.recycle_counts_.assign(tree.nodes_.capacity(), 0);
    tree.internal_count_ = 0;
    for (const TreeNode& nd : tree.nodes_) {
      if (!nd.is_leaf()) ++tree.internal_count_;
    }
    tree.check_structure();
    if (tree.internal_count_ > config.max_internal_nodes) {
      throw InvalidConfig("tree has more internal nodes than the configured budget");
    }
    return tree;
  }

  // --- Algorithm subroutines, public so tests and persistence can drive them ---

  /// Returns a node to its fresh-leaf state: counters cleared, regressor
  /// reset, children detached. The parent link is the caller's concern.
  void reset_node(NodeId v) {
    TreeNode& nd = node_at(v);
    if (!nd.is_leaf()) {
      --internal_count_;
      nd.left.reset();
      nd.right.reset();
    }
    nd.stats.reset();
    nd.regressor.reset();
  }

  /// Walks from v toward the root, re-deriving each parent's subtree-minimum
  /// count as min of its children, and stops early at the first parent whose
  /// recorded count already matches the child's.
  void update_min_counts(NodeId v) {
    while (v != root_) {
      const NodeId parent = *node_at(v).parent;
      TreeNode& p = nodes_[parent];
      if (p.stats.min_leaf_count == nodes_[v].stats.min_leaf_count) break;
      p.stats.min_leaf_count = std::min(nodes_[*p.left].stats.min_leaf_count,
                                        nodes_[*p.right].stats.min_leaf_count);
      v = parent;
    }
  }

  /// Descends along the child with the smaller recorded count (ties go
  /// left) and returns the reached leaf: the orphan candidate.
  NodeId find_smallest_leaf() const {
    NodeId v = root_;
    while (!nodes_[v].is_leaf()) {
      const TreeNode& nd = nodes_[v];
      v = (nodes_[*nd.right].stats.min_leaf_count < nodes_[*nd.left].stats.min_leaf_count)
              ? *nd.right
              : *nd.left;
    }
    return v;
  }

  /// Recycles the orphan leaf s and its parent into children of leaf j: the
  /// orphan's sibling takes the parent's place under the grandparent, and
  /// the two freed nodes restart as j's children. Node count and the
  /// internal-node count are unchanged. Throws SwapUnavailable when s has
  /// no grandparent or overlaps with j; the caller then skips the split.
  void swap_into(NodeId j) {
    if (!node_at(j).is_leaf()) throw std::logic_error("swap target must be a leaf");
    const NodeId orphan = find_smallest_leaf();
    if (orphan == j) throw SwapUnavailable("orphan coincides with the splitting leaf");
    if (!nodes_[orphan].parent) throw SwapUnavailable("orphan has no parent");
    const NodeId orphan_parent = *nodes_[orphan].parent;
    if (orphan_parent == j) throw SwapUnavailable("orphan parent coincides with the splitting leaf");
    if (!nodes_[orphan_parent].parent) throw SwapUnavailable("orphan has no grandparent");
    const NodeId grandparent = *nodes_[orphan_parent].parent;
    const NodeId sibling =
        (*nodes_[orphan_parent].left == orphan) ? *nodes_[orphan_parent].right
                                                : *nodes_[orphan_parent].left;

    if (*nodes_[grandparent].left == orphan_parent) {
      nodes_[grandparent].left = sibling;
    } else {
      nodes_[grandparent].right = sibling;
    }
    nodes_[sibling].parent = grandparent;
    update_min_counts(sibling);

    reset_node(orphan);
    bump_recycle(orphan);
    nodes_[j].left = orphan;
    nodes_[orphan].parent = j;

    reset_node(orphan_parent);
    bump_recycle(orphan_parent);
    nodes_[j].right = orphan_parent;
    nodes_[orphan_parent].parent = j;

    ++internal_count_;  // j turned internal; the freed parent turned leaf
    ++swaps_;
  }

  /// One online training step: descend from the root, counting the arrival
  /// at every node; split or recycle at an eligible leaf; at each internal
  /// node train the regressor toward the expectation-difference target and
  /// follow it down.
  void train_example(const SparseVector& x, uint32_t label) {
    if (label < 1) throw InvalidConfig("labels must be >= 1");
    NodeId j = root_;
    for (;;) {
      nodes_[j].stats.record_arrival(label);
      if (nodes_[j].is_leaf()) {
        bool split = false;
        if (nodes_[j].stats.distinct_labels() >= 2) {
          if (internal_count_ < config_.max_internal_nodes) {
            create_children(j);
            split = true;
          } else if (swap_condition_met(j)) {
            try {
              swap_into(j);
              split = true;
            } catch (const SwapUnavailable&) {
              // degenerate orphan; skip the split this time
            }
          }
        }
        if (!split) {
          ++nodes_[j].stats.min_leaf_count;
          break;
        }
        const uint64_t inherited = nodes_[j].stats.min_leaf_count;
        nodes_[*nodes_[j].left].stats.min_leaf_count = inherited / 2;
        nodes_[*nodes_[j].right].stats.min_leaf_count = inherited - inherited / 2;
        update_min_counts(*nodes_[j].left);
      }

      // Internal node (possibly freshly split): negative expectation gap
      // sends the example left, otherwise right.
      TreeNode& nd = nodes_[j];
      ClassStats& cs = nd.stats.per_class.find(label)->second;
      const double target = (nd.stats.mean_score_total > cs.mean_score) ? -1.0 : 1.0;
      nd.regressor.update(x, target, config_.step);
      const double score = nd.regressor.predict(x);
      ++cs.trained;
      cs.score_sum += score;
      cs.mean_score = cs.score_sum / static_cast<double>(cs.trained);
      ++nd.stats.trained_total;
      nd.stats.score_sum_total += score;
      nd.stats.mean_score_total =
          nd.stats.score_sum_total / static_cast<double>(nd.stats.trained_total);
      j = (target < 0.0) ? *nd.left : *nd.right;
    }
    ++examples_seen_;
  }

  /// Routes x by regressor sign (positive goes right) and returns the
  /// majority label of the reached leaf. A leaf that has not seen any
  /// example yet defers to the deepest counted node on the path. Throws
  /// UntrainedTree before any training.
  uint32_t predict(const SparseVector& x) const { return predict_traced(x).label; }

  Prediction predict_traced(const SparseVector& x) const {
    const TreeNode* nd = &nodes_[root_];
    if (nd->stats.arrivals_total == 0) {
      throw UntrainedTree("predict called before any training example");
    }
    Prediction out;
    const TreeNode* labeled = nd;
    while (!nd->is_leaf()) {
      const double score = nd->regressor.predict(x);
      ++out.regressor_evals;
      ++out.depth;
      nd = &nodes_[score > 0.0 ? *nd->right : *nd->left];
      if (nd->stats.arrivals_total > 0) labeled = nd;
    }
    out.label = labeled->stats.majority_label;
    return out;
  }

  /// Leaf reached by test-time routing, with no trained-tree requirement.
  NodeId route_to_leaf(const SparseVector& x) const {
    NodeId v = root_;
    while (!nodes_[v].is_leaf()) {
      v = nodes_[v].regressor.predict(x) > 0.0 ? *nodes_[v].right : *nodes_[v].left;
    }
    return v;
  }

  /// Majority label of a node's arrivals; smallest id wins ties.
  uint32_t majority_label(NodeId v) const {
    const TreeNode& nd = node_at(v);
    if (nd.stats.arrivals_total == 0) throw EmptyLeaf("node has no class counts");
    return nd.stats.majority_label;
  }

  DepthStats depth_stats() const {
    DepthStats out;
    double mass = 0.0;
    double weighted = 0.0;
    visit_depth(root_, 0, [&](const TreeNode& nd, uint32_t depth) {
      out.max_depth = std::max(out.max_depth, depth);
      if (nd.is_leaf()) {
        const double w = static_cast<double>(nd.stats.arrivals_total);
        mass += w;
        weighted += w * depth;
      }
    });
    out.mean_leaf_depth = mass > 0.0 ? weighted / mass : 0.0;
    return out;
  }

  /// Pre-order traversal hook for metrics and persistence.
  template <typename Visitor>
  void visit_preorder(Visitor&& visit) const {
    visit_depth(root_, 0,
                [&](const TreeNode& nd, uint32_t) { visit(nd); });
  }

  NodeId root() const { return root_; }
  size_t node_count() const { return nodes_.size(); }
  uint32_t internal_nodes() const { return internal_count_; }
  const TreeNode& node(NodeId id) const { return node_at(id); }
  const TrainConfig& config() const { return config_; }
  uint64_t examples_seen() const { return examples_seen_; }
  uint64_t swaps_performed() const { return swaps_; }

  /// Times each node id was reset during orphan recycling.
  const std::vector<uint32_t>& recycle_counts() const { return recycle_counts_; }

  /// Verifies arena-wide structural invariants: a single root, every node
  /// reachable exactly once, symmetric parent/child links, children in
  /// pairs. Throws std::logic_error naming the violation.
  void check_structure() const {
    if (root_ >= nodes_.size()) throw std::logic_error("root id out of range");
    if (nodes_[root_].parent) throw std::logic_error("root must not have a parent");
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{root_};
    size_t visited = 0;
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      if (id >= nodes_.size()) throw std::logic_error("child id out of range");
      if (seen[id]) throw std::logic_error("node reachable twice (cycle or shared child)");
      seen[id] = true;
      ++visited;
      const TreeNode& nd = nodes_[id];
      if (nd.id != id) throw std::logic_error("node id does not match its arena slot");
      if (nd.left.has_value() != nd.right.has_value()) {
        throw std::logic_error("children must come in pairs");
      }
      for (const std::optional<NodeId>& child : {nd.left, nd.right}) {
        if (!child) continue;
        if (*child >= nodes_.size()) throw std::logic_error("child id out of range");
        if (!nodes_[*child].parent || *nodes_[*child].parent != id) {
          throw std::logic_error("child does not point back to its parent");
        }
        stack.push_back(*child);
      }
    }
    if (visited != nodes_.size()) {
      throw std::logic_error("unreachable nodes in the arena");
    }
  }

private:
  NodeId allocate_node() {
    TreeNode nd;
    nd.id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(std::move(nd));
    return nodes_.back().id;
  }

  void create_children(NodeId j) {
    const NodeId left = allocate_node();
    const NodeId right = allocate_node();
    nodes_[left].parent = j;
    nodes_[right].parent = j;
    nodes_[j].left = left;
    nodes_[j].right = right;
    ++internal_count_;
  }

  bool swap_condition_met(NodeId j) const {
    const NodeStats& stats = nodes_[j].stats;
    const double lhs =
        static_cast<double>(stats.min_leaf_count) - static_cast<double>(stats.majority_count);
    const double rhs = config_.swap_resistance *
                       (static_cast<double>(nodes_[root_].stats.min_leaf_count) + 1.0);
    return lhs > rhs;
  }

  void bump_recycle(NodeId v) {
    if (v >= recycle_counts_.size()) recycle_counts_.resize(v + 1, 0);
    ++recycle_counts_[v];
  }

  TreeNode& node_at(NodeId id) {
    if (id >= nodes_.size()) throw std::out_of_range("node id " + std::to_string(id));
    return nodes_[id];
  }
  const TreeNode& node_at(NodeId id) const {
    if (id >= nodes_.size()) throw std::out_of_range("node id " + std::to_string(id));
    return nodes_[id];
  }

  template <typename Visitor>
  void visit_depth(NodeId id, uint32_t depth, Visitor&& visit) const {
    const TreeNode& nd = nodes_[id];
    visit(nd, depth);
    if (!nd.is_leaf()) {
      visit_depth(*nd.left, depth + 1, visit);
      visit_depth(*nd.right, depth + 1, visit);
    }
  }

  TrainConfig config_;
  std::vector<TreeNode> nodes_;
  NodeId root_ = 0;
  uint32_t internal_count_ = 0;
  uint64_t examples_seen_ = 0;
  uint64_t swaps_ = 0;
  std::vector<uint32_t> recycle_counts_;
};

}  // namespace lomtree
