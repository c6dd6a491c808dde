#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "lomtree/baselines.hpp"
#include "lomtree/trainer.hpp"
#include "test_support.hpp"

using namespace lomtree;

namespace {

SparseVector one_hot(uint32_t index) {
  return SparseVector::from_entries({{index, 1.0}});
}

}  // namespace

TEST_CASE("random label trees are complete and deterministic") {
  SECTION("two labels make a depth-1 tree with one internal node") {
    const RandomLabelTree rt = RandomLabelTree::build({4, 9}, 1);
    REQUIRE(rt.depth() == 1);
    REQUIRE(rt.nodes().size() == 3);
    REQUIRE(rt.num_labels() == 2);
  }
  SECTION("five labels spread leaves across depths 3 and 2") {
    const RandomLabelTree rt = RandomLabelTree::build({1, 2, 3, 4, 5}, 7);
    REQUIRE(rt.depth() == 3);
    uint32_t shallow = rt.depth();
    for (const auto& [label, path] : rt.paths()) {
      shallow = std::min(shallow, static_cast<uint32_t>(path.bits.size()));
    }
    REQUIRE(rt.depth() - shallow <= 1);
  }
  SECTION("leaf depths differ by at most one for any label count") {
    for (uint32_t k = 2; k <= 64; ++k) {
      std::vector<uint32_t> labels;
      for (uint32_t i = 0; i < k; ++i) labels.push_back(i + 1);
      const RandomLabelTree rt = RandomLabelTree::build(labels, k);
      REQUIRE(rt.num_labels() == k);
      REQUIRE(rt.depth() == static_cast<uint32_t>(std::ceil(std::log2(k))));
      uint32_t lo = rt.depth();
      std::set<std::vector<bool>> distinct_paths;
      for (const auto& [label, path] : rt.paths()) {
        lo = std::min(lo, static_cast<uint32_t>(path.bits.size()));
        distinct_paths.insert(path.bits);
      }
      REQUIRE(rt.depth() - lo <= 1);
      REQUIRE(distinct_paths.size() == k);  // one leaf per label
    }
  }
  SECTION("the same seed reproduces the same assignment") {
    const std::vector<uint32_t> labels{3, 1, 4, 1, 5, 9, 2, 6};
    const RandomLabelTree a = RandomLabelTree::build(labels, 42);
    const RandomLabelTree b = RandomLabelTree::build(labels, 42);
    for (const auto& [label, path] : a.paths()) {
      REQUIRE(b.paths().at(label).bits == path.bits);
    }
  }
  SECTION("a single label is refused") {
    REQUIRE_THROWS_AS(RandomLabelTree::build({5}, 1), TooFewClasses);
    REQUIRE_THROWS_AS(RandomLabelTree::build({5, 5, 5}, 1), TooFewClasses);
  }
}

TEST_CASE("random label tree training follows the assigned paths") {
  SECTION("separable two-class data trains to zero error within 5 passes") {
    const auto data = test_support::one_hot_dataset(2, 40, 11);
    const RandomLabelTree rt = train_rtree(data, 0.5, 5, 11, 11);
    uint64_t errors = 0;
    for (const Example& ex : data) {
      if (rt.predict(ex.features) != ex.label) ++errors;
    }
    REQUIRE(errors == 0);
  }
  SECTION("one update touches exactly the regressors on the label's path") {
    RandomLabelTree rt = RandomLabelTree::build({1, 2, 3, 4, 5}, 3);
    rt.train_example(one_hot(0), 3, 0.5);
    uint64_t touched = 0;
    for (const auto& nd : rt.nodes()) touched += nd.regressor.updates_seen();
    REQUIRE(touched == rt.path_length(3));
  }
  SECTION("labels outside the fixed set are refused") {
    RandomLabelTree rt = RandomLabelTree::build({1, 2}, 3);
    REQUIRE_THROWS_AS(rt.train_example(one_hot(0), 99, 0.5), UnknownLabel);
    REQUIRE_THROWS_AS(rt.path_length(99), UnknownLabel);
  }
  SECTION("prediction always lands on an assigned label") {
    const RandomLabelTree rt = RandomLabelTree::build({10, 20, 30}, 5);
    const uint32_t label = rt.predict(one_hot(2));  // untrained: routes left
    REQUIRE((label == 10 || label == 20 || label == 30));
    const Prediction traced = rt.predict_traced(one_hot(2));
    REQUIRE(traced.regressor_evals == traced.depth);
    REQUIRE(traced.regressor_evals <= rt.depth());
  }
}

TEST_CASE("one-against-all trains a scorer per observed class") {
  SECTION("ten separable examples reach zero training error") {
    const auto data = test_support::one_hot_dataset(2, 10, 5);
    const OaaModel model = train_oaa(data, 0.5, 5, 5);
    REQUIRE(model.num_classes() == 2);
    for (const Example& ex : data) {
      REQUIRE(model.predict(ex.features) == ex.label);
    }
  }
  SECTION("an untrained model cannot predict") {
    const OaaModel model;
    REQUIRE_THROWS_AS(model.predict(one_hot(0)), UntrainedModel);
  }
  SECTION("prediction scores every known class exactly once") {
    const auto data = test_support::one_hot_dataset(4, 16, 5);
    const OaaModel model = train_oaa(data, 0.5, 1, 5);
    const Prediction traced = model.predict_traced(one_hot(1));
    REQUIRE(traced.regressor_evals == 4);
  }
  SECTION("ties resolve toward the smallest class id") {
    std::map<uint32_t, LinearRegressor> regs;
    regs.emplace(9, LinearRegressor{});
    regs.emplace(3, LinearRegressor{});
    const OaaModel model = OaaModel::from_parts(std::move(regs));
    REQUIRE(model.predict(one_hot(0)) == 3);  // both score exactly 0
  }
  SECTION("training updates every known regressor") {
    OaaModel model;
    model.train_example(one_hot(0), 1, 0.5);
    model.train_example(one_hot(1), 2, 0.5);
    model.train_example(one_hot(2), 3, 0.5);
    uint64_t updates = 0;
    for (const auto& [cls, reg] : model.regressors()) updates += reg.updates_seen();
    REQUIRE(updates == 1 + 2 + 3);  // 1 then 2 then 3 classes known
  }
}
