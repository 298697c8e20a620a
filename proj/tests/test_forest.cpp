#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "pdw/forest.hpp"

using namespace pdw;

namespace {

LabeledSample sample1d(double x, int label) {
  LabeledSample s;
  s.features.values.fill(0.0);
  s.features.values[0] = x;
  s.label = label;
  return s;
}

std::vector<LabeledSample> random_samples(std::size_t n, int num_classes,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> value(0.0, 1.0);
  std::uniform_int_distribution<int> cls(0, num_classes - 1);
  std::vector<LabeledSample> samples(n);
  for (LabeledSample& s : samples) {
    for (double& v : s.features.values) v = value(rng);
    s.label = cls(rng);
  }
  return samples;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::vector<int> all_features() {
  std::vector<int> f(kNumFeatures);
  std::iota(f.begin(), f.end(), 0);
  return f;
}

DecisionTree leaf_tree(int label) {
  DecisionTree t;
  TreeNode leaf;
  leaf.label = label;
  t.nodes.push_back(leaf);
  return t;
}

}  // namespace

TEST_CASE("forest defaults match the reference configuration") {
  const ForestConfig cfg;
  CHECK(cfg.num_trees == 100);
  CHECK(cfg.features_per_split == 4);
  CHECK(cfg.min_info_gain == 0.01);
  CHECK(cfg.bootstrap);
}

TEST_CASE("entropy of count vectors") {
  CHECK(entropy(std::vector<std::size_t>{8, 8}) == 1.0);
  CHECK(entropy(std::vector<std::size_t>{16, 0}) == 0.0);
  // direct formula evaluation for (3, 5, 7, 9)
  CHECK(entropy(std::vector<std::size_t>{3, 5, 7, 9}) ==
        doctest::Approx(1.8955734405551428).epsilon(1e-12));
  CHECK_THROWS_AS(entropy(std::vector<std::size_t>{0, 0}), std::invalid_argument);
}

TEST_CASE("information gain of splits") {
  CHECK(information_gain(std::vector<std::size_t>{8, 8}, std::vector<std::size_t>{8, 0},
                         std::vector<std::size_t>{0, 8}) == 1.0);
  // children with identical class mix carry no information
  CHECK(information_gain(std::vector<std::size_t>{8, 8}, std::vector<std::size_t>{4, 4},
                         std::vector<std::size_t>{4, 4}) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(information_gain(std::vector<std::size_t>{4, 4},
                                   std::vector<std::size_t>{4, 4},
                                   std::vector<std::size_t>{0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(information_gain(std::vector<std::size_t>{4, 4},
                                   std::vector<std::size_t>{4, 0},
                                   std::vector<std::size_t>{1, 4}),
                  std::invalid_argument);
}

TEST_CASE("information gain matches the oracle on random splits") {
  Rng rng(3);
  std::uniform_int_distribution<std::size_t> count(0, 30);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::size_t> left(4), right(4), parent(4);
    std::size_t nl = 0, nr = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      left[k] = count(rng);
      right[k] = count(rng);
      parent[k] = left[k] + right[k];
      nl += left[k];
      nr += right[k];
    }
    if (nl == 0 || nr == 0) continue;
    const double got = information_gain(parent, left, right);
    CHECK(got == doctest::Approx(oracle::info_gain(parent, left, right)).epsilon(1e-12));
    CHECK(got >= -1e-12);
    CHECK(got <= entropy(parent) + 1e-12);
  }
}

TEST_CASE("best split on a forced midpoint") {
  const std::vector<LabeledSample> samples = {sample1d(0.0, 0), sample1d(1.0, 1)};
  const auto split = best_split(samples, all_indices(2), std::vector<int>{0}, 2);
  REQUIRE(split.has_value());
  CHECK(split->feature == 0);
  CHECK(split->threshold == 0.5);
  CHECK(split->gain == 1.0);
}

TEST_CASE("no split exists when all features are constant") {
  const std::vector<LabeledSample> samples = {sample1d(2.0, 0), sample1d(2.0, 1),
                                              sample1d(2.0, 1)};
  CHECK(!best_split(samples, all_indices(3), all_features(), 2).has_value());
  CHECK(!best_split(samples, all_indices(1), all_features(), 2).has_value());
}

TEST_CASE("best split equals exhaustive search on random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::vector<LabeledSample> samples = random_samples(20, 2, 100 + seed);
    const auto split = best_split(samples, all_indices(20), all_features(), 2);
    REQUIRE(split.has_value());

    oracle::RefSplit ref;
    const auto counts = oracle::ref_counts(samples, all_indices(20), 2);
    for (int f = 0; f < int(kNumFeatures); ++f) {
      std::vector<double> values;
      for (const LabeledSample& s : samples) values.push_back(s.features.values[f]);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      for (std::size_t v = 0; v + 1 < values.size(); ++v) {
        const double thr = values[v] + (values[v + 1] - values[v]) / 2.0;
        std::vector<std::size_t> li, ri;
        for (std::size_t i = 0; i < samples.size(); ++i)
          (samples[i].features.values[f] <= thr ? li : ri).push_back(i);
        const double gain = oracle::info_gain(counts, oracle::ref_counts(samples, li, 2),
                                              oracle::ref_counts(samples, ri, 2));
        if (gain > ref.gain ||
            (gain == ref.gain &&
             (f < ref.feature || (f == ref.feature && thr < ref.threshold))))
          ref = {f, thr, gain};
      }
    }
    CHECK(split->feature == ref.feature);
    CHECK(split->threshold == doctest::Approx(ref.threshold).epsilon(1e-12));
    CHECK(split->gain == doctest::Approx(ref.gain).epsilon(1e-12));
    CHECK(split->gain >= 0.0);
    CHECK(split->gain <= entropy(counts) + 1e-12);
  }
}

TEST_CASE("pure nodes become leaves immediately") {
  const std::vector<LabeledSample> samples = {sample1d(0.0, 1), sample1d(5.0, 1),
                                              sample1d(9.0, 1)};
  Rng rng(1);
  const DecisionTree tree = grow_tree(samples, all_indices(3), 2, 4, 0.01, rng);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].is_leaf());
  CHECK(tree.nodes[0].label == 1);
}

TEST_CASE("perfectly separable data grows a depth-1 tree") {
  std::vector<LabeledSample> samples;
  for (int i = 0; i < 10; ++i) samples.push_back(sample1d(i < 5 ? 0.0 : 1.0, i < 5 ? 0 : 1));
  Rng rng(1);
  const DecisionTree tree =
      grow_tree(samples, all_indices(10), 2, int(kNumFeatures), 0.01, rng);
  CHECK(tree_stats(tree).depth == 1);
  CHECK(tree_stats(tree).leaves == 2);
  for (const LabeledSample& s : samples) CHECK(predict_tree(tree, s.features) == s.label);
}

TEST_CASE("a node whose best gain is below 0.01 becomes a leaf") {
  // 1000 samples, only one separable on feature 0; best achievable gain ~0.0014
  std::vector<LabeledSample> samples;
  samples.push_back(sample1d(1.0, 0));
  for (int i = 0; i < 498; ++i) samples.push_back(sample1d(0.0, 0));
  for (int i = 0; i < 501; ++i) samples.push_back(sample1d(0.0, 1));

  const auto split = best_split(samples, all_indices(samples.size()), all_features(), 2);
  REQUIRE(split.has_value());
  CHECK(split->gain > 0.0);
  CHECK(split->gain < 0.01);

  Rng rng(1);
  const DecisionTree tree = grow_tree(samples, all_indices(samples.size()), 2,
                                      int(kNumFeatures), 0.01, rng);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].label == 1);  // 501 vs 499 majority
}

TEST_CASE("single tree equals the brute-force reference on 30-sample instances") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int num_classes = seed % 2 == 0 ? 2 : 3;
    const std::vector<LabeledSample> samples = random_samples(30, num_classes, 900 + seed);
    Rng rng(seed);
    const DecisionTree tree = grow_tree(samples, all_indices(30), num_classes,
                                        int(kNumFeatures), 0.01, rng);
    const auto ref = oracle::ref_grow(samples, all_indices(30), num_classes, 0.01);
    CHECK(oracle::ref_equals(*ref, tree, 0));
  }
}

TEST_CASE("forest training is deterministic and covers every sample") {
  Dataset train = build_dataset(ScenarioConfig::awgn(3.0, 7), LabelScheme::Binary, 1500);
  ForestConfig cfg;
  cfg.num_trees = 20;
  cfg.seed = 99;
  const ForestModel a = train_forest(train, cfg);
  const ForestModel b = train_forest(train, cfg);
  REQUIRE(a.trees.size() == 20);
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (std::size_t i = 0; i < a.trees[t].nodes.size(); ++i) {
      CHECK(a.trees[t].nodes[i].feature == b.trees[t].nodes[i].feature);
      CHECK(a.trees[t].nodes[i].threshold == b.trees[t].nodes[i].threshold);
      CHECK(a.trees[t].nodes[i].label == b.trees[t].nodes[i].label);
    }
  }
  // every sample reaches a leaf in every tree
  for (const DecisionTree& tree : a.trees)
    for (const LabeledSample& s : train.samples) {
      const int label = predict_tree(tree, s.features);
      CHECK(label >= 0);
      CHECK(label < 2);
    }
}

TEST_CASE("forest prediction is a majority vote with deterministic ties") {
  ForestModel model;
  model.scheme = LabelScheme::Binary;
  model.num_classes = 2;
  FeatureVector x;

  model.trees.assign(100, leaf_tree(1));
  CHECK(predict_forest(model, x) == 1);  // unanimity

  model.trees.clear();
  for (int i = 0; i < 60; ++i) model.trees.push_back(leaf_tree(0));
  for (int i = 0; i < 40; ++i) model.trees.push_back(leaf_tree(1));
  CHECK(predict_forest(model, x) == 0);  // majority np

  model.trees.clear();
  for (int i = 0; i < 50; ++i) model.trees.push_back(leaf_tree(1));
  for (int i = 0; i < 50; ++i) model.trees.push_back(leaf_tree(0));
  CHECK(predict_forest(model, x) == 0);  // tie -> lowest class index
}

TEST_CASE("routing changes only at nodes testing the bumped feature") {
  const std::vector<LabeledSample> samples = random_samples(200, 3, 5);
  Rng rng(8);
  const DecisionTree tree = grow_tree(samples, all_indices(200), 3, 4, 0.01, rng);

  const auto trace = [&](const FeatureVector& x) {
    std::vector<int> path;
    int i = 0;
    while (!tree.nodes[i].is_leaf()) {
      path.push_back(i);
      i = x.values[tree.nodes[i].feature] <= tree.nodes[i].threshold
              ? tree.nodes[i].left
              : tree.nodes[i].right;
    }
    path.push_back(i);
    return path;
  };

  Rng xrng(6);
  std::normal_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    FeatureVector x;
    for (double& v : x.values) v = value(xrng);
    for (int f = 0; f < int(kNumFeatures); ++f) {
      FeatureVector bumped = x;
      bumped.values[f] += 0.7;
      const std::vector<int> base = trace(x);
      const std::vector<int> after = trace(bumped);
      for (std::size_t k = 0; k < std::min(base.size(), after.size()); ++k) {
        if (base[k] != after[k]) break;
        // shared prefix: any divergence must happen at a node testing f
        if (k + 1 < base.size() && k + 1 < after.size() &&
            base[k + 1] != after[k + 1])
          CHECK(tree.nodes[base[k]].feature == f);
      }
    }
  }
}

TEST_CASE("malformed forest files are rejected") {
  const auto path = std::filesystem::temp_directory_path() / "pdw_bad_forest.json";
  {
    std::ofstream out(path);
    out << R"({"model":"random_forest","scheme":"binary","num_classes":2,)"
        << R"("num_trees":1,"features_per_split":4,"min_info_gain":0.01,)"
        << R"("seed":1,"bootstrap":true,)"
        << R"("trees":[{"feature":99,"threshold":0.5,"left":{"leaf":0},"right":{"leaf":1}}]})";
  }
  CHECK_THROWS_WITH_AS(load_forest(path), doctest::Contains("malformed"),
                       std::runtime_error);
  {
    std::ofstream out(path);
    out << R"({"model":"random_forest","scheme":"binary","num_classes":2,)"
        << R"("num_trees":1,"features_per_split":4,"min_info_gain":0.01,)"
        << R"("seed":1,"bootstrap":true,"trees":[{"leaf":7}]})";
  }
  CHECK_THROWS_WITH_AS(load_forest(path), doctest::Contains("label out of range"),
                       std::runtime_error);
}

TEST_CASE("forest json round trip preserves structure and predictions") {
  Dataset train = build_dataset(ScenarioConfig::awgn(0.0, 3), LabelScheme::Binary, 600);
  ForestConfig cfg;
  cfg.num_trees = 10;
  cfg.seed = 4;
  const ForestModel model = train_forest(train, cfg);
  const auto path = std::filesystem::temp_directory_path() / "pdw_forest.json";
  save_forest(model, path);
  const ForestModel back = load_forest(path);
  CHECK(back.scheme == model.scheme);
  CHECK(back.num_classes == model.num_classes);
  CHECK(back.config.min_info_gain == model.config.min_info_gain);
  REQUIRE(back.trees.size() == model.trees.size());
  for (const LabeledSample& s : train.samples)
    CHECK(predict_forest(back, s.features) == predict_forest(model, s.features));
}
