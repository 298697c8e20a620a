#include "pdw/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "pdw/json_util.hpp"

namespace pdw {

double entropy(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (std::size_t c : class_counts) total += c;
  if (total == 0) throw std::invalid_argument("entropy: all counts are zero");
  double h = 0.0;
  for (std::size_t c : class_counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double information_gain(std::span<const std::size_t> parent,
                        std::span<const std::size_t> left,
                        std::span<const std::size_t> right) {
  std::size_t np = 0, nl = 0, nr = 0;
  for (std::size_t c : parent) np += c;
  for (std::size_t c : left) nl += c;
  for (std::size_t c : right) nr += c;
  if (nl == 0 || nr == 0)
    throw std::invalid_argument("information_gain: empty child");
  if (nl + nr != np)
    throw std::invalid_argument("information_gain: children must partition parent");
  const double wl = static_cast<double>(nl) / static_cast<double>(np);
  const double wr = static_cast<double>(nr) / static_cast<double>(np);
  return entropy(parent) - wl * entropy(left) - wr * entropy(right);
}

namespace {

int majority_class(std::span<const std::size_t> counts) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(counts.size()); ++k)
    if (counts[k] > counts[best]) best = k;  // ties keep the lowest index
  return best;
}

std::vector<std::size_t> class_counts(std::span<const LabeledSample> samples,
                                      std::span<const std::size_t> indices,
                                      int num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t i : indices) ++counts[samples[i].label];
  return counts;
}

// Entropy computed from counts and precomputed total, zero-total safe.
double entropy_fast(std::span<const std::size_t> counts, std::size_t total) {
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

std::optional<Split> best_split(std::span<const LabeledSample> samples,
                                std::span<const std::size_t> indices,
                                std::span<const int> candidate_features,
                                int num_classes) {
  const std::size_t n = indices.size();
  if (n < 2) return std::nullopt;

  const std::vector<std::size_t> parent = class_counts(samples, indices, num_classes);
  const double parent_entropy = entropy_fast(parent, n);

  std::optional<Split> best;
  std::vector<std::size_t> order(indices.begin(), indices.end());
  std::vector<std::size_t> left(num_classes), right(num_classes);

  for (int f : candidate_features) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return samples[a].features.values[f] < samples[b].features.values[f];
    });
    std::fill(left.begin(), left.end(), 0);
    right = parent;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      const int label = samples[order[i]].label;
      ++left[label];
      --right[label];
      const double lo = samples[order[i]].features.values[f];
      const double hi = samples[order[i + 1]].features.values[f];
      if (lo == hi) continue;
      const double threshold = lo + (hi - lo) / 2.0;
      const std::size_t nl = i + 1, nr = n - nl;
      const double gain =
          parent_entropy -
          (static_cast<double>(nl) / static_cast<double>(n)) * entropy_fast(left, nl) -
          (static_cast<double>(nr) / static_cast<double>(n)) * entropy_fast(right, nr);
      const bool better =
          !best || gain > best->gain ||
          (gain == best->gain &&
           (f < best->feature || (f == best->feature && threshold < best->threshold)));
      if (better) best = Split{f, threshold, gain};
    }
  }
  return best;
}

namespace {

struct TreeBuilder {
  std::span<const LabeledSample> samples;
  int num_classes;
  int features_per_split;
  double min_info_gain;
  Rng& rng;
  DecisionTree tree;
  std::array<int, kNumFeatures> feature_pool;

  TreeBuilder(std::span<const LabeledSample> s, int k, int fps, double mig, Rng& r)
      : samples(s), num_classes(k), features_per_split(fps), min_info_gain(mig),
        rng(r) {
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
  }

  std::vector<int> draw_feature_subset() {
    const int m = static_cast<int>(kNumFeatures);
    const int k = std::min(features_per_split, m);
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, m - 1);
      std::swap(feature_pool[i], feature_pool[pick(rng)]);
    }
    return {feature_pool.begin(), feature_pool.begin() + k};
  }

  int make_leaf(std::span<const std::size_t> counts) {
    TreeNode leaf;
    leaf.label = majority_class(counts);
    tree.nodes.push_back(leaf);
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  int build(std::vector<std::size_t> indices) {
    const std::vector<std::size_t> counts =
        class_counts(samples, indices, num_classes);
    const std::size_t present =
        std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
    if (present <= 1) return make_leaf(counts);

    const std::vector<int> subset = draw_feature_subset();
    const std::optional<Split> split =
        best_split(samples, indices, subset, num_classes);
    if (!split || split->gain < min_info_gain) return make_leaf(counts);

    std::vector<std::size_t> left_idx, right_idx;
    left_idx.reserve(indices.size());
    right_idx.reserve(indices.size());
    for (std::size_t i : indices)
      (samples[i].features.values[split->feature] <= split->threshold ? left_idx
                                                                      : right_idx)
          .push_back(i);
    indices.clear();
    indices.shrink_to_fit();

    const int node_index = static_cast<int>(tree.nodes.size());
    TreeNode node;
    node.feature = split->feature;
    node.threshold = split->threshold;
    tree.nodes.push_back(node);
    const int left = build(std::move(left_idx));
    const int right = build(std::move(right_idx));
    tree.nodes[node_index].left = left;
    tree.nodes[node_index].right = right;
    return node_index;
  }
};

}  // namespace

DecisionTree grow_tree(std::span<const LabeledSample> samples,
                       std::vector<std::size_t> indices, int num_classes,
                       int features_per_split, double min_info_gain, Rng& rng) {
  if (indices.empty()) throw std::invalid_argument("grow_tree: empty sample set");
  TreeBuilder builder(samples, num_classes, features_per_split, min_info_gain, rng);
  builder.build(std::move(indices));
  return std::move(builder.tree);
}

ForestModel train_forest(const Dataset& train_set, const ForestConfig& cfg) {
  if (train_set.samples.empty())
    throw std::invalid_argument("train_forest: empty training set");
  if (cfg.num_trees < 1 || cfg.features_per_split < 1)
    throw std::invalid_argument("train_forest: bad config");

  ForestModel model;
  model.scheme = train_set.scheme;
  model.num_classes = num_classes(train_set.scheme);
  model.config = cfg;
  model.trees.resize(cfg.num_trees);

  const std::span<const LabeledSample> samples(train_set.samples);
  const std::size_t n = samples.size();

  // Per-tree streams make results independent of the worker count.
  const auto grow_one = [&](int t) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> indices(n);
    if (cfg.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t& i : indices) i = pick(rng);
    } else {
      std::iota(indices.begin(), indices.end(), 0);
    }
    model.trees[t] = grow_tree(samples, std::move(indices), model.num_classes,
                               cfg.features_per_split, cfg.min_info_gain, rng);
  };

  const unsigned workers =
      std::min<unsigned>(std::thread::hardware_concurrency(),
                         static_cast<unsigned>(cfg.num_trees));
  if (workers <= 1) {
    for (int t = 0; t < cfg.num_trees; ++t) grow_one(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < cfg.num_trees; t = next.fetch_add(1))
          grow_one(t);
      });
    for (std::thread& th : pool) th.join();
  }
  return model;
}

int predict_tree(const DecisionTree& tree, const FeatureVector& x) {
  if (tree.nodes.empty()) throw std::invalid_argument("predict_tree: empty tree");
  int i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const TreeNode& node = tree.nodes[i];
    i = x.values[node.feature] <= node.threshold ? node.left : node.right;
  }
  return tree.nodes[i].label;
}

int predict_forest(const ForestModel& model, const FeatureVector& x) {
  if (model.trees.empty()) throw std::invalid_argument("predict_forest: no trees");
  std::vector<std::size_t> votes(model.num_classes, 0);
  for (const DecisionTree& tree : model.trees) ++votes[predict_tree(tree, x)];
  return majority_class(votes);
}

namespace {

int depth_of(const DecisionTree& tree, int i) {
  const TreeNode& node = tree.nodes[i];
  if (node.is_leaf()) return 0;
  return 1 + std::max(depth_of(tree, node.left), depth_of(tree, node.right));
}

nlohmann::json node_to_json(const DecisionTree& tree, int i) {
  const TreeNode& node = tree.nodes[i];
  if (node.is_leaf()) return nlohmann::json{{"leaf", node.label}};
  return nlohmann::json{{"feature", node.feature},
                        {"threshold", node.threshold},
                        {"left", node_to_json(tree, node.left)},
                        {"right", node_to_json(tree, node.right)}};
}

int node_from_json(const nlohmann::json& j, DecisionTree& tree) {
  const int index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    tree.nodes[index].label = j.at("leaf").get<int>();
    return index;
  }
  tree.nodes[index].feature = j.at("feature").get<int>();
  tree.nodes[index].threshold = j.at("threshold").get<double>();
  const int left = node_from_json(j.at("left"), tree);
  const int right = node_from_json(j.at("right"), tree);
  tree.nodes[index].left = left;
  tree.nodes[index].right = right;
  return index;
}

}  // namespace

TreeStats tree_stats(const DecisionTree& tree) {
  TreeStats stats;
  stats.depth = depth_of(tree, 0);
  for (const TreeNode& node : tree.nodes)
    if (node.is_leaf()) ++stats.leaves;
  return stats;
}

void save_forest(const ForestModel& model, const std::filesystem::path& path,
                 const std::string& audit) {
  nlohmann::json trees = nlohmann::json::array();
  for (const DecisionTree& tree : model.trees) trees.push_back(node_to_json(tree, 0));
  nlohmann::json j{{"model", "random_forest"},
                   {"scheme", scheme_name(model.scheme)},
                   {"num_classes", model.num_classes},
                   {"num_trees", model.config.num_trees},
                   {"features_per_split", model.config.features_per_split},
                   {"min_info_gain", model.config.min_info_gain},
                   {"seed", model.config.seed},
                   {"bootstrap", model.config.bootstrap},
                   {"trees", trees}};
  if (!audit.empty()) j["audit"] = audit;
  save_json_file(j, path);
}

ForestModel load_forest(const std::filesystem::path& path) {
  const nlohmann::json j = load_json_file(path);
  if (j.value("model", "") != "random_forest")
    throw std::runtime_error("load_forest: not a random forest model file");
  ForestModel model;
  const auto scheme = scheme_from_name(j.at("scheme").get<std::string>());
  if (!scheme) throw std::runtime_error("load_forest: unknown scheme");
  model.scheme = *scheme;
  model.num_classes = j.at("num_classes").get<int>();
  model.config.num_trees = j.at("num_trees").get<int>();
  model.config.features_per_split = j.at("features_per_split").get<int>();
  model.config.min_info_gain = j.at("min_info_gain").get<double>();
  model.config.seed = j.at("seed").get<std::uint64_t>();
  model.config.bootstrap = j.at("bootstrap").get<bool>();
  for (const nlohmann::json& t : j.at("trees")) {
    DecisionTree tree;
    node_from_json(t, tree);
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) {
        if (node.label < 0 || node.label >= model.num_classes)
          throw std::runtime_error("load_forest: leaf label out of range");
      } else if (node.feature >= static_cast<int>(kNumFeatures) || node.left < 0 ||
                 node.right < 0 ||
                 node.left >= static_cast<int>(tree.nodes.size()) ||
                 node.right >= static_cast<int>(tree.nodes.size())) {
        throw std::runtime_error("load_forest: malformed tree node");
      }
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace pdw
