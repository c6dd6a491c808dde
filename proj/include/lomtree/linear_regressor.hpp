#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lomtree/error.hpp"
#include "lomtree/sparse_vector.hpp"

namespace lomtree {

/// Sparse linear scorer trained online by squared-loss gradient descent
/// toward +/-1 targets. A fresh regressor predicts 0 everywhere.
class LinearRegressor {
public:
  LinearRegressor() = default;

  double predict(const SparseVector& x) const {
    double score = bias_;
    for (const FeatureEntry& e : x.entries()) {
      if (auto it = weights_.find(e.index); it != weights_.end()) {
        score += it->second * e.value;
      }
    }
    return score;
  }

  /// One stochastic gradient step on the squared loss (predict - target)^2 / 2.
  /// Throws NonFiniteUpdate when the step diverges.
  void update(const SparseVector& x, double target, double step) {
    const double residual = predict(x) - target;
    if (!std::isfinite(residual)) {
      throw NonFiniteUpdate("prediction overflowed; reduce the step size");
    }
    const double scale = step * residual;
    for (const FeatureEntry& e : x.entries()) {
      double& w = weights_[e.index];
      w -= scale * e.value;
      if (!std::isfinite(w)) {
        throw NonFiniteUpdate("weight overflowed at index " + std::to_string(e.index));
      }
    }
    bias_ -= scale;
    if (!std::isfinite(bias_)) {
      throw NonFiniteUpdate("bias overflowed");
    }
    ++updates_seen_;
  }

  void reset() {
    weights_.clear();
    bias_ = 0.0;
    updates_seen_ = 0;
  }

  double bias() const { return bias_; }
  uint64_t updates_seen() const { return updates_seen_; }
  size_t weight_count() const { return weights_.size(); }

  double weight(uint32_t index) const {
    auto it = weights_.find(index);
    return it == weights_.end() ? 0.0 : it->second;
  }

  /// (index, weight) pairs in index order; the serialization layout.
  std::vector<std::pair<uint32_t, double>> sorted_weights() const {
    std::vector<std::pair<uint32_t, double>> out(weights_.begin(), weights_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  static LinearRegressor from_parts(const std::vector<std::pair<uint32_t, double>>& weights,
                                    double bias, uint64_t updates_seen) {
    LinearRegressor r;
    for (const auto& [index, w] : weights) r.weights_[index] = w;
    r.bias_ = bias;
    r.updates_seen_ = updates_seen;
    return r;
  }

private:
  std::unordered_map<uint32_t, double> weights_;
  double bias_ = 0.0;
  uint64_t updates_seen_ = 0;
};

}  // namespace lomtree
