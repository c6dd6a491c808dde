#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lomtree {

/// One nonzero coordinate of a sparse example.
struct FeatureEntry {
  uint32_t index = 0;
  double value = 0.0;

  friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

/// Sparse feature vector. Entries are kept sorted by strictly increasing
/// index and every value is finite; absent indices read as zero.
class SparseVector {
public:
  SparseVector() = default;

  /// Builds a vector from arbitrary-order entries. Sorts them and rejects
  /// duplicate indices and non-finite values with std::invalid_argument.
  static SparseVector from_entries(std::vector<FeatureEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const FeatureEntry& a, const FeatureEntry& b) { return a.index < b.index; });
    for (size_t i = 0; i < entries.size(); ++i) {
      if (!std::isfinite(entries[i].value)) {
        throw std::invalid_argument("non-finite feature value");
      }
      if (i > 0 && entries[i].index == entries[i - 1].index) {
        throw std::invalid_argument("duplicate feature index " + std::to_string(entries[i].index));
      }
    }
    SparseVector v;
    v.entries_ = std::move(entries);
    return v;
  }

  const std::vector<FeatureEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  /// Largest index + 1, or 0 for an empty vector.
  uint32_t dimension() const { return entries_.empty() ? 0 : entries_.back().index + 1; }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * e.value;
    return s;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
  std::vector<FeatureEntry> entries_;
};

/// A labeled training or test point. Labels are opaque positive integers;
/// they need not be contiguous.
struct Example {
  SparseVector features;
  uint32_t label = 1;

  friend bool operator==(const Example&, const Example&) = default;
};

/// Observed quantities of a dataset: feature dimension, distinct labels,
/// record count.
struct DatasetMeta {
  uint32_t dimension = 0;
  uint32_t num_classes = 0;
  size_t num_examples = 0;
};

inline DatasetMeta summarize(std::span<const Example> examples) {
  DatasetMeta meta;
  meta.num_examples = examples.size();
  std::vector<uint32_t> labels;
  labels.reserve(examples.size());
  for (const Example& ex : examples) {
    meta.dimension = std::max(meta.dimension, ex.features.dimension());
    labels.push_back(ex.label);
  }
  std::sort(labels.begin(), labels.end());
  meta.num_classes =
      static_cast<uint32_t>(std::unique(labels.begin(), labels.end()) - labels.begin());
  return meta;
}

}  // namespace lomtree
