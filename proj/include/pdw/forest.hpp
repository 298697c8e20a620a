#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pdw/dataset.hpp"

namespace pdw {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = -1;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestConfig {
  int num_trees = 100;
  int features_per_split = 4;
  double min_info_gain = 0.01;  // bits; nodes whose best IG falls below become leaves
  std::uint64_t seed = 1;
  bool bootstrap = true;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  LabelScheme scheme = LabelScheme::Binary;
  int num_classes = 2;
  ForestConfig config;
};

// Shannon entropy in bits of a class-count vector; zero counts contribute
// nothing. Throws std::invalid_argument when the total is zero.
double entropy(std::span<const std::size_t> class_counts);

// H(parent) - |L|/|P| H(left) - |R|/|P| H(right). Children must partition the
// parent and both be non-empty.
double information_gain(std::span<const std::size_t> parent,
                        std::span<const std::size_t> left,
                        std::span<const std::size_t> right);

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best (feature, threshold) over the candidate features, thresholds taken at
// midpoints between consecutive distinct sorted values. Ties resolved toward
// the lower feature index, then the lower threshold. nullopt when no feature
// admits a split.
std::optional<Split> best_split(std::span<const LabeledSample> samples,
                                std::span<const std::size_t> indices,
                                std::span<const int> candidate_features,
                                int num_classes);

// Top-down growth: leaves on purity, on absence of a split, or when the best
// gain over a fresh random feature subset is below min_info_gain. Leaf labels
// are node majorities, ties toward the lowest class index.
DecisionTree grow_tree(std::span<const LabeledSample> samples,
                       std::vector<std::size_t> indices, int num_classes,
                       int features_per_split, double min_info_gain, Rng& rng);

// 100 trees by default, each on an independent bootstrap resample drawn from
// a per-tree stream derived from (seed, tree index).
ForestModel train_forest(const Dataset& train_set, const ForestConfig& cfg);

int predict_tree(const DecisionTree& tree, const FeatureVector& x);
// Majority vote across trees, ties toward the lowest class index.
int predict_forest(const ForestModel& model, const FeatureVector& x);

struct TreeStats {
  int depth = 0;
  int leaves = 0;
};
TreeStats tree_stats(const DecisionTree& tree);

// audit describes the data the model was fitted on (scenario, seeds, size).
void save_forest(const ForestModel& model, const std::filesystem::path& path,
                 const std::string& audit = "");
ForestModel load_forest(const std::filesystem::path& path);

}  // namespace pdw
