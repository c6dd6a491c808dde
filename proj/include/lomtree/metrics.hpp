#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lomtree/error.hpp"
#include "lomtree/sparse_vector.hpp"
#include "lomtree/tree.hpp"

namespace lomtree {

/// Per-split empirical quantities the splitting objective is evaluated on:
/// class proportions, per-class positive-routing rates, and the overall
/// positive-routing rate.
struct SplitStats {
  std::vector<double> class_proportions;  // pi_i, sums to 1
  std::vector<double> conditional_rates;  // P_i = P(route right | class i)
  double positive_rate = 0.0;             // beta = P(route right)

  static constexpr double kTolerance = 1e-9;

  /// Builds stats from explicit proportions and rates; beta is derived.
  static SplitStats from_rates(std::vector<double> proportions, std::vector<double> rates) {
    SplitStats s;
    s.class_proportions = std::move(proportions);
    s.conditional_rates = std::move(rates);
    s.positive_rate = 0.0;
    for (size_t i = 0; i < s.class_proportions.size(); ++i) {
      s.positive_rate += s.class_proportions[i] * s.conditional_rates[i];
    }
    s.validate();
    return s;
  }

  /// Builds stats by counting (label, routed-right) observations.
  static SplitStats from_observations(std::span<const uint32_t> labels,
                                      std::span<const uint8_t> routed_right) {
    if (labels.size() != routed_right.size()) {
      throw InvalidStats("labels and routing bits differ in length");
    }
    if (labels.empty()) throw InvalidStats("no observations");
    std::map<uint32_t, std::pair<uint64_t, uint64_t>> counts;  // label -> (total, right)
    uint64_t right_total = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
      auto& [total, right] = counts[labels[i]];
      ++total;
      if (routed_right[i]) {
        ++right;
        ++right_total;
      }
    }
    SplitStats s;
    const double n = static_cast<double>(labels.size());
    for (const auto& [label, c] : counts) {
      s.class_proportions.push_back(static_cast<double>(c.first) / n);
      s.conditional_rates.push_back(static_cast<double>(c.second) /
                                    static_cast<double>(c.first));
    }
    s.positive_rate = static_cast<double>(right_total) / n;
    s.validate();
    return s;
  }

  void validate() const {
    if (class_proportions.size() != conditional_rates.size()) {
      throw InvalidStats("proportion and rate vectors differ in length");
    }
    if (class_proportions.empty()) throw InvalidStats("no classes");
    double pi_sum = 0.0;
    double beta_check = 0.0;
    for (size_t i = 0; i < class_proportions.size(); ++i) {
      const double pi = class_proportions[i];
      const double p = conditional_rates[i];
      if (!(pi >= 0.0)) throw InvalidStats("negative class proportion");
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidStats("conditional rate outside [0,1]");
      pi_sum += pi;
      beta_check += pi * p;
    }
    if (std::abs(pi_sum - 1.0) > kTolerance) {
      throw InvalidStats("class proportions sum to " + std::to_string(pi_sum));
    }
    if (std::abs(beta_check - positive_rate) > kTolerance) {
      throw InvalidStats("positive rate inconsistent with per-class rates");
    }
  }
};

/// Splitting objective J = 2 sum_i pi_i |beta - P_i|, in [0,1]; 1 exactly
/// for a maximally pure and balanced split.
inline double objective_j(const SplitStats& s) {
  s.validate();
  double j = 0.0;
  for (size_t i = 0; i < s.class_proportions.size(); ++i) {
    j += s.class_proportions[i] * std::abs(s.positive_rate - s.conditional_rates[i]);
  }
  return 2.0 * j;
}

/// Purity factor alpha = sum_i pi_i min(P_i, 1 - P_i), in [0, 0.5];
/// 0 means every class routes entirely to one side.
inline double purity_alpha(const SplitStats& s) {
  s.validate();
  double a = 0.0;
  for (size_t i = 0; i < s.class_proportions.size(); ++i) {
    a += s.class_proportions[i] *
         std::min(s.conditional_rates[i], 1.0 - s.conditional_rates[i]);
  }
  return a;
}

struct PurityBound {
  double alpha = 0.0;
  double bound = 0.0;
};

/// Purity/balancedness relation: alpha <= min((2 - J)/(4b) - b, 0.5) with
/// b the symmetrized balancing factor min(beta, 1 - beta). Throws
/// DegenerateBeta when beta is 0 or 1 (constant hypothesis).
inline PurityBound purity_bound(const SplitStats& s) {
  s.validate();
  const double beta_sym = std::min(s.positive_rate, 1.0 - s.positive_rate);
  if (beta_sym <= 0.0) {
    throw DegenerateBeta("balancing factor is 0 or 1; bound undefined");
  }
  const double j = objective_j(s);
  PurityBound out;
  out.alpha = purity_alpha(s);
  out.bound = std::min((2.0 - j) / (4.0 * beta_sym) - beta_sym, 0.5);
  return out;
}

/// Empirical split statistics at an internal tree node: every example is
/// routed from the root by the test-time rule, and among those whose path
/// passes through `node`, the node's own routing decision provides the
/// indicator. Throws NoExamplesReachNode for an empty cohort.
inline SplitStats estimate_split_stats(const LomTree& tree, NodeId node,
                                       std::span<const Example> data) {
  if (tree.node(node).is_leaf()) {
    throw std::invalid_argument("split stats need an internal node");
  }
  std::vector<uint32_t> labels;
  std::vector<uint8_t> bits;
  for (const Example& ex : data) {
    NodeId v = tree.root();
    for (;;) {
      if (v == node) {
        labels.push_back(ex.label);
        bits.push_back(tree.node(v).regressor.predict(ex.features) > 0.0 ? 1 : 0);
        break;
      }
      if (tree.node(v).is_leaf()) break;
      v = tree.node(v).regressor.predict(ex.features) > 0.0 ? *tree.node(v).right
                                                            : *tree.node(v).left;
    }
  }
  if (labels.empty()) {
    throw NoExamplesReachNode("no examples reach node " + std::to_string(node));
  }
  return SplitStats::from_observations(labels, bits);
}

/// Leaf-weighted Shannon entropy of leaf label distributions.
struct TreeEntropy {
  double value = 0.0;
  std::vector<double> leaf_weights;                       // one per leaf, sums to 1
  std::vector<std::vector<double>> leaf_distributions;    // label proportions per leaf
};

/// Entropy of an arbitrary example-to-cell assignment; `cell_of` maps an
/// example to a cell identifier. Cells play the role of leaves.
template <typename CellOf>
TreeEntropy partition_entropy(std::span<const Example> data, CellOf&& cell_of) {
  if (data.empty()) throw std::invalid_argument("entropy needs a nonempty dataset");
  std::map<uint64_t, std::map<uint32_t, uint64_t>> cells;  // cell -> label histogram
  for (const Example& ex : data) {
    ++cells[static_cast<uint64_t>(cell_of(ex))][ex.label];
  }
  TreeEntropy out;
  const double n = static_cast<double>(data.size());
  for (const auto& [cell, hist] : cells) {
    uint64_t cell_total = 0;
    for (const auto& [label, c] : hist) cell_total += c;
    const double w = static_cast<double>(cell_total) / n;
    std::vector<double> dist;
    double h = 0.0;
    for (const auto& [label, c] : hist) {
      const double p = static_cast<double>(c) / static_cast<double>(cell_total);
      dist.push_back(p);
      if (p > 0.0) h += p * std::log(1.0 / p);  // 0 ln(1/0) reads as 0
    }
    out.leaf_weights.push_back(w);
    out.leaf_distributions.push_back(std::move(dist));
    out.value += w * h;
  }
  return out;
}

/// Tree quality measure G: examples are routed to leaves by the test-time
/// rule; G is the leaf-weight-averaged entropy of leaf label proportions.
inline TreeEntropy tree_entropy(const LomTree& tree, std::span<const Example> data) {
  return partition_entropy(data, [&](const Example& ex) { return tree.route_to_leaf(ex.features); });
}

/// Entropy of the raw label distribution (a single-cell partition).
inline double label_entropy(std::span<const Example> data) {
  return partition_entropy(data, [](const Example&) { return 0u; }).value;
}

}  // namespace lomtree
