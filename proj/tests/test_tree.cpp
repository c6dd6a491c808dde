#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "lomtree/tree.hpp"
#include "test_support.hpp"

using namespace lomtree;

namespace {

SparseVector one_hot(uint32_t index) {
  return SparseVector::from_entries({{index, 1.0}});
}

TreeNode make_node(NodeId id, std::optional<NodeId> parent, std::optional<NodeId> left,
                   std::optional<NodeId> right, uint64_t min_count = 0) {
  TreeNode nd;
  nd.id = id;
  nd.parent = parent;
  nd.left = left;
  nd.right = right;
  nd.stats.min_leaf_count = min_count;
  return nd;
}

TrainConfig config_with(uint32_t max_nodes, double step = 0.5, double rs = 4.0) {
  TrainConfig cfg;
  cfg.max_internal_nodes = max_nodes;
  cfg.step = step;
  cfg.swap_resistance = rs;
  return cfg;
}

void arrive(TreeNode& nd, uint32_t label, uint64_t times) {
  for (uint64_t i = 0; i < times; ++i) nd.stats.record_arrival(label);
}

// Full recheck of the running-sum and staleness invariants, straight from
// the per-class maps.
void check_stats_invariants(const LomTree& tree) {
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    const TreeNode& nd = tree.node(id);
    double score_total = 0.0;
    uint64_t trained_total = 0;
    for (const auto& [label, cs] : nd.stats.per_class) {
      if (cs.trained > 0) {
        REQUIRE_THAT(cs.mean_score * static_cast<double>(cs.trained),
                     Catch::Matchers::WithinRel(cs.score_sum, 1e-9) ||
                         Catch::Matchers::WithinAbs(cs.score_sum, 1e-12));
      } else {
        REQUIRE(cs.mean_score == 0.0);
      }
      score_total += cs.score_sum;
      trained_total += cs.trained;
    }
    REQUIRE(trained_total == nd.stats.trained_total);
    if (nd.stats.trained_total > 0) {
      REQUIRE_THAT(nd.stats.mean_score_total * static_cast<double>(nd.stats.trained_total),
                   Catch::Matchers::WithinRel(nd.stats.score_sum_total, 1e-9) ||
                       Catch::Matchers::WithinAbs(nd.stats.score_sum_total, 1e-12));
    } else {
      REQUIRE(nd.stats.mean_score_total == 0.0);
    }
    if (!nd.is_leaf()) {
      const uint64_t child_min = std::min(tree.node(*nd.left).stats.min_leaf_count,
                                          tree.node(*nd.right).stats.min_leaf_count);
      REQUIRE(nd.stats.min_leaf_count <= child_min);  // staleness is one-sided
    }
  }
}

}  // namespace

TEST_CASE("reset_node returns a node to its brand-new state") {
  std::vector<TreeNode> nodes;
  TreeNode root = make_node(0, {}, {}, {}, 9);
  arrive(root, 4, 3);
  arrive(root, 6, 2);
  root.regressor = LinearRegressor::from_parts({{0, 1.5}}, 0.25, 7);
  nodes.push_back(std::move(root));
  LomTree tree = LomTree::from_parts(config_with(1), std::move(nodes), 0);

  tree.reset_node(0);
  const TreeNode& nd = tree.node(0);
  REQUIRE(nd.is_leaf());
  REQUIRE(nd.stats.per_class.empty());
  REQUIRE(nd.stats.arrivals_total == 0);
  REQUIRE(nd.stats.min_leaf_count == 0);
  REQUIRE(nd.stats.mean_score_total == 0.0);
  REQUIRE(nd.regressor.predict(one_hot(0)) == 0.0);
  REQUIRE(nd.regressor.updates_seen() == 0);
  REQUIRE_THROWS_AS(tree.majority_label(0), EmptyLeaf);

  // First routing comparison after a reset sees a zero expectation gap.
  REQUIRE(nd.stats.mean_score_total == 0.0);
  REQUIRE(nd.stats.per_class.count(4) == 0);
}

TEST_CASE("update_min_counts walks up and halts at an already-consistent parent") {
  // root(0) -> { P(1) -> { L(3), S2(4) }, S1(2) }
  std::vector<TreeNode> nodes;
  nodes.push_back(make_node(0, {}, 1, 2, 3));
  nodes.push_back(make_node(1, 0, 3, 4, 3));
  nodes.push_back(make_node(2, 0, {}, {}, 2));
  nodes.push_back(make_node(3, 1, {}, {}, 5));
  nodes.push_back(make_node(4, 1, {}, {}, 3));
  LomTree tree = LomTree::from_parts(config_with(2), std::move(nodes), 0);

  SECTION("parent is refreshed, grandparent is left alone once it matches") {
    tree.update_min_counts(3);
    REQUIRE(tree.node(1).stats.min_leaf_count == 3);  // min(5, 3)
    // The walk stopped at P: root would otherwise drop to min(3, 2) = 2.
    REQUIRE(tree.node(0).stats.min_leaf_count == 3);
  }
  SECTION("starting at the root is a no-op") {
    tree.update_min_counts(0);
    REQUIRE(tree.node(0).stats.min_leaf_count == 3);
    REQUIRE(tree.node(1).stats.min_leaf_count == 3);
  }
}

TEST_CASE("find_smallest_leaf descends by minimum count with left ties") {
  SECTION("a single-node tree returns its root") {
    LomTree tree(config_with(1));
    REQUIRE(tree.find_smallest_leaf() == tree.root());
  }
  SECTION("descends into the smaller child") {
    std::vector<TreeNode> nodes;
    nodes.push_back(make_node(0, {}, 1, 2, 2));
    nodes.push_back(make_node(1, 0, {}, {}, 7));
    nodes.push_back(make_node(2, 0, {}, {}, 2));
    LomTree tree = LomTree::from_parts(config_with(1), std::move(nodes), 0);
    REQUIRE(tree.find_smallest_leaf() == 2);
  }
  SECTION("equal counts fall through to the leftmost leaf") {
    std::vector<TreeNode> nodes;
    nodes.push_back(make_node(0, {}, 1, 2, 1));
    nodes.push_back(make_node(1, 0, 3, 4, 1));
    nodes.push_back(make_node(2, 0, 5, 6, 1));
    for (NodeId id = 3; id <= 6; ++id) {
      nodes.push_back(make_node(id, (id <= 4) ? 1 : 2, {}, {}, 1));
    }
    LomTree tree = LomTree::from_parts(config_with(3), std::move(nodes), 0);
    REQUIRE(tree.find_smallest_leaf() == 3);
  }
}

TEST_CASE("swap relinks the orphan pair under the splitting leaf") {
  // Before: r -> { x1 -> { j, d1 }, x2 -> { d2, gpa } },
  //         gpa -> { d3, pa }, pa -> { s, sib }, sib -> { d4, d5 }.
  std::vector<TreeNode> nodes;
  nodes.push_back(make_node(0, {}, 1, 2, 0));     // r
  nodes.push_back(make_node(1, 0, 3, 4, 1));      // x1
  nodes.push_back(make_node(2, 0, 5, 6, 0));      // x2
  nodes.push_back(make_node(3, 1, {}, {}, 1));    // j
  nodes.push_back(make_node(4, 1, {}, {}, 1));    // d1
  nodes.push_back(make_node(5, 2, {}, {}, 1));    // d2
  nodes.push_back(make_node(6, 2, 7, 8, 0));      // gpa
  nodes.push_back(make_node(7, 6, {}, {}, 1));    // d3
  nodes.push_back(make_node(8, 6, 9, 10, 0));     // pa
  nodes.push_back(make_node(9, 8, {}, {}, 0));    // s (the orphan)
  nodes.push_back(make_node(10, 8, 11, 12, 1));   // sib
  nodes.push_back(make_node(11, 10, {}, {}, 1));  // d4
  nodes.push_back(make_node(12, 10, {}, {}, 1));  // d5
  LomTree tree = LomTree::from_parts(config_with(6), std::move(nodes), 0);

  REQUIRE(tree.find_smallest_leaf() == 9);
  tree.swap_into(3);

  // After: j -> { s, pa } and sib hangs directly under gpa.
  REQUIRE(tree.node(3).left == NodeId{9});
  REQUIRE(tree.node(3).right == NodeId{8});
  REQUIRE(tree.node(9).parent == NodeId{3});
  REQUIRE(tree.node(8).parent == NodeId{3});
  REQUIRE(tree.node(8).is_leaf());
  REQUIRE(tree.node(6).right == NodeId{10});
  REQUIRE(tree.node(10).parent == NodeId{6});
  REQUIRE(tree.node(10).left == NodeId{11});
  REQUIRE(tree.node(10).right == NodeId{12});

  // Conservation: same nodes, same internal-node count, valid links.
  REQUIRE(tree.node_count() == 13);
  REQUIRE(tree.internal_nodes() == 6);
  REQUIRE_NOTHROW(tree.check_structure());
  REQUIRE(tree.swaps_performed() == 1);
  REQUIRE(tree.recycle_counts()[9] == 1);
  REQUIRE(tree.recycle_counts()[8] == 1);

  // Both recycled nodes restart from scratch.
  REQUIRE(tree.node(9).stats.arrivals_total == 0);
  REQUIRE(tree.node(8).stats.arrivals_total == 0);
  REQUIRE(tree.node(8).regressor.updates_seen() == 0);

  // The subtree-minimum counts were repaired along both touched paths.
  REQUIRE(tree.node(6).stats.min_leaf_count == 1);
  REQUIRE(tree.node(2).stats.min_leaf_count == 1);
  REQUIRE(tree.node(0).stats.min_leaf_count == 1);
}

TEST_CASE("swap handles the splitting leaf being the orphan's sibling") {
  // root -> { P -> { s, j }, X }: recycling s and P under j re-parents j
  // itself to the grandparent first.
  std::vector<TreeNode> nodes;
  nodes.push_back(make_node(0, {}, 1, 2, 0));
  nodes.push_back(make_node(1, 0, 3, 4, 0));   // P
  nodes.push_back(make_node(2, 0, {}, {}, 5)); // X
  nodes.push_back(make_node(3, 1, {}, {}, 0)); // s
  nodes.push_back(make_node(4, 1, {}, {}, 6)); // j
  LomTree tree = LomTree::from_parts(config_with(2), std::move(nodes), 0);

  REQUIRE(tree.find_smallest_leaf() == 3);
  tree.swap_into(4);
  REQUIRE(tree.node(0).left == NodeId{4});
  REQUIRE(tree.node(4).parent == NodeId{0});
  REQUIRE(tree.node(4).left == NodeId{3});
  REQUIRE(tree.node(4).right == NodeId{1});
  REQUIRE(tree.node(1).is_leaf());
  REQUIRE(tree.internal_nodes() == 2);
  REQUIRE_NOTHROW(tree.check_structure());
}

TEST_CASE("swap is unavailable on degenerate trees") {
  SECTION("the orphan lacks a grandparent in a depth-1 tree") {
    std::vector<TreeNode> nodes;
    nodes.push_back(make_node(0, {}, 1, 2, 1));
    nodes.push_back(make_node(1, 0, {}, {}, 5));
    nodes.push_back(make_node(2, 0, {}, {}, 1));
    LomTree tree = LomTree::from_parts(config_with(1), std::move(nodes), 0);
    REQUIRE_THROWS_AS(tree.swap_into(1), SwapUnavailable);
  }
  SECTION("the splitting leaf is itself the orphan") {
    std::vector<TreeNode> nodes;
    nodes.push_back(make_node(0, {}, 1, 2, 1));
    nodes.push_back(make_node(1, 0, {}, {}, 1));
    nodes.push_back(make_node(2, 0, {}, {}, 5));
    LomTree tree = LomTree::from_parts(config_with(1), std::move(nodes), 0);
    REQUIRE_THROWS_AS(tree.swap_into(1), SwapUnavailable);
  }
  SECTION("the orphan is the root of a single-node tree") {
    LomTree tree(config_with(1));
    REQUIRE_THROWS_AS(tree.swap_into(0), SwapUnavailable);
  }
}

TEST_CASE("training replays the toy two-class trace at a fresh root") {
  LomTree tree(config_with(3));

  // First example: one observed class, so the root cannot split yet.
  tree.train_example(one_hot(0), 1);
  REQUIRE(tree.node(tree.root()).is_leaf());
  REQUIRE(tree.internal_nodes() == 0);
  REQUIRE(tree.node(tree.root()).stats.min_leaf_count == 1);

  // Second example brings a second class: split, zero expectation gap,
  // routed right; counters halve as floor/remainder.
  tree.train_example(one_hot(1), 2);
  const TreeNode& root = tree.node(tree.root());
  REQUIRE_FALSE(root.is_leaf());
  REQUIRE(tree.internal_nodes() == 1);
  const TreeNode& left = tree.node(*root.left);
  const TreeNode& right = tree.node(*root.right);
  REQUIRE(right.stats.arrivals_total == 1);
  REQUIRE(right.stats.per_class.at(2).arrivals == 1);
  REQUIRE(left.stats.arrivals_total == 0);
  REQUIRE(right.stats.min_leaf_count == 2);  // inherited 1, then the arrival
  REQUIRE(left.stats.min_leaf_count == 0);   // floor(1/2)

  // With a 0.5 step on one-hot features the score saturates to exactly 1.
  REQUIRE(root.stats.per_class.at(2).mean_score == 1.0);
  REQUIRE(root.stats.mean_score_total == 1.0);

  // Third example (class 1): positive expectation gap routes left.
  tree.train_example(one_hot(0), 1);
  REQUIRE(left.stats.arrivals_total == 1);
  REQUIRE(left.stats.per_class.at(1).arrivals == 1);
  REQUIRE(root.stats.per_class.at(1).mean_score == -1.0);
  REQUIRE(root.stats.mean_score_total == 0.0);
}

TEST_CASE("a single-class stream never splits") {
  LomTree tree(config_with(5));
  for (int i = 0; i < 100; ++i) tree.train_example(one_hot(3), 7);
  REQUIRE(tree.node(tree.root()).is_leaf());
  REQUIRE(tree.internal_nodes() == 0);
  REQUIRE(tree.node(tree.root()).stats.min_leaf_count == 100);
  REQUIRE(tree.node(tree.root()).stats.per_class.at(7).arrivals == 100);
}

namespace {

// Capacity-saturated fixture for the recycling condition:
// root -> { P -> { s, s2 }, j }, all counts 4 except the crowded leaf j.
LomTree swap_condition_fixture(uint64_t crowded_count) {
  std::vector<TreeNode> nodes;
  nodes.push_back(make_node(0, {}, 1, 2, 4));
  nodes.push_back(make_node(1, 0, 3, 4, 4));
  TreeNode j = make_node(2, 0, {}, {}, crowded_count);
  arrive(j, 1, 1);
  arrive(j, 2, 2);
  nodes.push_back(std::move(j));
  nodes.push_back(make_node(3, 1, {}, {}, 4));
  nodes.push_back(make_node(4, 1, {}, {}, 4));
  return LomTree::from_parts(config_with(2), std::move(nodes), 0);
}

}  // namespace

TEST_CASE("the recycling condition compares starvation against swap resistance") {
  // Arrival of class 1 makes the leaf counts {1:2, 2:2}; the margin is
  // C_j - 2 against 4 * (C_root + 1) = 20.
  SECTION("below the threshold the leaf just absorbs the example") {
    LomTree tree = swap_condition_fixture(21);
    tree.train_example(one_hot(0), 1);
    REQUIRE(tree.node(2).is_leaf());
    REQUIRE(tree.node(2).stats.min_leaf_count == 22);
    REQUIRE(tree.swaps_performed() == 0);
  }
  SECTION("above the threshold the orphan pair is recycled under the leaf") {
    LomTree tree = swap_condition_fixture(23);
    tree.train_example(one_hot(0), 1);
    REQUIRE_FALSE(tree.node(2).is_leaf());
    REQUIRE(tree.node(2).left == NodeId{3});   // recycled orphan
    REQUIRE(tree.node(2).right == NodeId{1});  // recycled orphan parent
    REQUIRE(tree.node(0).left == NodeId{4});   // sibling moved up
    REQUIRE(tree.swaps_performed() == 1);
    REQUIRE(tree.internal_nodes() == 2);
    REQUIRE(tree.recycle_counts()[3] == 1);
    REQUIRE(tree.recycle_counts()[1] == 1);
    REQUIRE_NOTHROW(tree.check_structure());

    // Counter split plus the propagated minimum, then the example lands in
    // one of the fresh children.
    REQUIRE(tree.node(2).stats.min_leaf_count == 11);  // min(floor(23/2), 12)
    REQUIRE(tree.node(0).stats.min_leaf_count == 4);
    const uint64_t left_c = tree.node(3).stats.min_leaf_count;
    const uint64_t right_c = tree.node(1).stats.min_leaf_count;
    REQUIRE(left_c + right_c == 24);  // 11 + 12, plus one arrival
  }
}

TEST_CASE("structure, budget, and running sums hold under random streams") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<uint32_t> label_dist(1, 8);
  LomTree tree(config_with(7, 0.2));
  for (int i = 1; i <= 2000; ++i) {
    const uint32_t label = label_dist(rng);
    tree.train_example(test_support::random_sparse_vector(rng, 16, 6), label);
    if (i % 100 == 0) {
      REQUIRE(tree.internal_nodes() <= tree.config().max_internal_nodes);
      REQUIRE_NOTHROW(tree.check_structure());
      check_stats_invariants(tree);
    }
  }

  // Incremental majority equals a batch argmax with smallest-id ties.
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    const TreeNode& nd = tree.node(id);
    if (nd.stats.per_class.empty()) continue;
    uint32_t best_label = 0;
    uint64_t best_count = 0;
    for (const auto& [label, cs] : nd.stats.per_class) {
      if (cs.arrivals > best_count ||
          (cs.arrivals == best_count && label < best_label)) {
        best_count = cs.arrivals;
        best_label = label;
      }
    }
    REQUIRE(tree.majority_label(id) == best_label);
    REQUIRE(nd.stats.majority_count == best_count);
  }
}

TEST_CASE("recycle counts stay logarithmic on a shifting stream") {
  // 16 classes through a 3-split tree; the class window moves so early
  // leaves starve and keep being recycled.
  LomTree tree(config_with(3));
  const size_t n = 4096;
  for (size_t i = 0; i < n; ++i) {
    const uint32_t phase = static_cast<uint32_t>(i / 256) % 8;
    const uint32_t cls = (phase * 2 + static_cast<uint32_t>(i % 4)) % 16;
    tree.train_example(one_hot(cls), cls + 1);
    if (i % 256 == 255) {
      REQUIRE_NOTHROW(tree.check_structure());
      check_stats_invariants(tree);
    }
  }
  REQUIRE(tree.swaps_performed() > 0);
  const double bound = std::log2(static_cast<double>(n));
  for (const uint32_t count : tree.recycle_counts()) {
    REQUIRE(static_cast<double>(count) <= bound);
  }
  REQUIRE_NOTHROW(tree.check_structure());
  REQUIRE(tree.internal_nodes() <= 3);
}

TEST_CASE("majority maintenance breaks ties toward the smaller label") {
  NodeStats stats;
  SECTION("smaller label arrives second") {
    for (int i = 0; i < 5; ++i) stats.record_arrival(9);
    for (int i = 0; i < 5; ++i) stats.record_arrival(3);
    REQUIRE(stats.majority_label == 3);
    REQUIRE(stats.majority_count == 5);
  }
  SECTION("smaller label arrives first") {
    for (int i = 0; i < 5; ++i) stats.record_arrival(3);
    for (int i = 0; i < 5; ++i) stats.record_arrival(9);
    REQUIRE(stats.majority_label == 3);
  }
  SECTION("singleton") {
    stats.record_arrival(7);
    REQUIRE(stats.majority_label == 7);
  }
}

TEST_CASE("prediction routes by regressor sign and reads leaf majorities") {
  SECTION("majority at a root leaf") {
    std::vector<TreeNode> nodes;
    TreeNode root = make_node(0, {}, {}, {});
    arrive(root, 1, 3);
    arrive(root, 2, 1);
    nodes.push_back(std::move(root));
    const LomTree tree = LomTree::from_parts(config_with(1), std::move(nodes), 0);
    REQUIRE(tree.predict(one_hot(0)) == 1);
  }
  SECTION("a positive score steps right") {
    std::vector<TreeNode> nodes;
    TreeNode root = make_node(0, {}, 1, 2);
    arrive(root, 5, 1);
    root.regressor =
        LinearRegressor::from_parts({{0, 0.7}}, 0.0, 1);
    nodes.push_back(std::move(root));
    nodes.push_back(make_node(1, 0, {}, {}));
    TreeNode right = make_node(2, 0, {}, {});
    arrive(right, 5, 2);
    nodes.push_back(std::move(right));
    const LomTree tree = LomTree::from_parts(config_with(1), std::move(nodes), 0);
    REQUIRE(tree.node(0).regressor.predict(one_hot(0)) == 0.7);
    REQUIRE(tree.predict(one_hot(0)) == 5);
    const Prediction traced = tree.predict_traced(one_hot(0));
    REQUIRE(traced.depth == 1);
    REQUIRE(traced.regressor_evals == 1);
  }
  SECTION("an unseen leaf defers to the deepest counted ancestor") {
    std::vector<TreeNode> nodes;
    TreeNode root = make_node(0, {}, 1, 2);
    arrive(root, 1, 2);
    arrive(root, 2, 1);
    root.regressor = LinearRegressor::from_parts({}, 1.0, 1);  // always right
    nodes.push_back(std::move(root));
    TreeNode left = make_node(1, 0, {}, {});
    arrive(left, 2, 1);
    nodes.push_back(std::move(left));
    nodes.push_back(make_node(2, 0, {}, {}));  // right leaf never reached in training
    const LomTree tree = LomTree::from_parts(config_with(1), std::move(nodes), 0);
    REQUIRE(tree.predict(one_hot(9)) == 1);
  }
  SECTION("prediction is repeatable and mutation-free") {
    LomTree tree(config_with(3));
    for (int i = 0; i < 20; ++i) tree.train_example(one_hot(i % 3), (i % 3) + 1);
    const SparseVector probe = one_hot(1);
    const uint32_t first = tree.predict(probe);
    const uint64_t seen = tree.examples_seen();
    REQUIRE(tree.predict(probe) == first);
    REQUIRE(tree.examples_seen() == seen);
  }
  SECTION("an untrained tree cannot predict") {
    LomTree tree(config_with(1));
    REQUIRE_THROWS_AS(tree.predict(one_hot(0)), UntrainedTree);
  }
}

TEST_CASE("depth statistics") {
  SECTION("single node is (0, 0)") {
    LomTree tree(config_with(1));
    const DepthStats d = tree.depth_stats();
    REQUIRE(d.max_depth == 0);
    REQUIRE(d.mean_leaf_depth == 0.0);
  }
  SECTION("perfect depth-2 tree with uniform mass is (2, 2)") {
    std::vector<TreeNode> nodes;
    nodes.push_back(make_node(0, {}, 1, 2));
    nodes.push_back(make_node(1, 0, 3, 4));
    nodes.push_back(make_node(2, 0, 5, 6));
    for (NodeId id = 3; id <= 6; ++id) {
      TreeNode leaf = make_node(id, (id <= 4) ? 1 : 2, {}, {});
      arrive(leaf, id, 10);
      nodes.push_back(std::move(leaf));
    }
    const LomTree tree = LomTree::from_parts(config_with(3), std::move(nodes), 0);
    const DepthStats d = tree.depth_stats();
    REQUIRE(d.max_depth == 2);
    REQUIRE_THAT(d.mean_leaf_depth, Catch::Matchers::WithinAbs(2.0, 1e-12));
  }
  SECTION("max depth dominates the weighted mean") {
    std::mt19937_64 rng(5);
    LomTree tree(config_with(7));
    for (int i = 0; i < 500; ++i) {
      const uint32_t cls = static_cast<uint32_t>(rng() % 6);
      tree.train_example(one_hot(cls), cls + 1);
    }
    const DepthStats d = tree.depth_stats();
    REQUIRE(static_cast<double>(d.max_depth) >= d.mean_leaf_depth);
  }
}

TEST_CASE("configuration domains are enforced") {
  REQUIRE_THROWS_AS(LomTree(config_with(0)), InvalidConfig);
  TrainConfig bad_step = config_with(1);
  bad_step.step = 0.0;
  REQUIRE_THROWS_AS(LomTree(bad_step), InvalidConfig);
  TrainConfig bad_rs = config_with(1);
  bad_rs.swap_resistance = -1.0;
  REQUIRE_THROWS_AS(LomTree(bad_rs), InvalidConfig);
  TrainConfig bad_passes = config_with(1);
  bad_passes.passes = 0;
  REQUIRE_THROWS_AS(LomTree(bad_passes), InvalidConfig);
}

TEST_CASE("labels are opaque ids and need not be contiguous") {
  LomTree tree(config_with(3));
  for (int i = 0; i < 30; ++i) {
    tree.train_example(one_hot(0), 7);
    tree.train_example(one_hot(1), 1000000000);
  }
  const uint32_t a = tree.predict(one_hot(0));
  const uint32_t b = tree.predict(one_hot(1));
  REQUIRE(a == 7);
  REQUIRE(b == 1000000000);
}

TEST_CASE("preorder traversal visits parents before children, left first") {
  std::vector<TreeNode> nodes;
  nodes.push_back(make_node(0, {}, 1, 2));
  nodes.push_back(make_node(1, 0, 3, 4));
  nodes.push_back(make_node(2, 0, {}, {}));
  nodes.push_back(make_node(3, 1, {}, {}));
  nodes.push_back(make_node(4, 1, {}, {}));
  const LomTree tree = LomTree::from_parts(config_with(2), std::move(nodes), 0);
  std::vector<NodeId> order;
  tree.visit_preorder([&](const TreeNode& nd) { order.push_back(nd.id); });
  REQUIRE(order == std::vector<NodeId>{0, 1, 3, 4, 2});
}

TEST_CASE("arena capacity covers a full run at the node budget") {
  LomTree tree(config_with(7));
  for (int i = 0; i < 1000; ++i) tree.train_example(one_hot(i % 16), (i % 16) + 1);
  REQUIRE(tree.internal_nodes() == 7);
  REQUIRE(tree.node_count() <= 15);  // 2T + 1
  REQUIRE_NOTHROW(tree.check_structure());
}
