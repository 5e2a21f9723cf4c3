#include "cryfl/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cryfl/error.hpp"
#include "cryfl/rng.hpp"

namespace cryfl {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(std::span<const FeatureVector> x, std::span<const int> y, const ForestConfig& cfg,
             std::size_t mtry, std::uint64_t seed)
      : x_(x), y_(y), cfg_(cfg), mtry_(mtry), rng_(seed) {}

  DecisionTree grow() {
    const std::size_t n = x_.size();
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = static_cast<std::size_t>(rng_.below(n));
    total_ = static_cast<double>(n);
    tree_.importance.assign(x_.front().size(), 0.0);
    build(sample, 0);
    return std::move(tree_);
  }

 private:
  int build(std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::size_t pos = 0;
    for (auto i : idx) pos += y_[i] > 0 ? 1 : 0;
    tree_.nodes[id].label = 2 * pos >= idx.size() ? 1 : -1;

    const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
    if (depth >= cfg_.max_depth || idx.size() < 2 * min_leaf || pos == 0 || pos == idx.size()) return id;

    const SplitChoice best = find_split(idx, pos);
    if (best.feature < 0) return id;

    tree_.importance[static_cast<std::size_t>(best.feature)] +=
        static_cast<double>(idx.size()) / total_ * best.decrease;

    std::vector<std::size_t> left, right;
    for (auto i : idx) (x_[i][static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    auto& node = tree_.nodes[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  SplitChoice find_split(const std::vector<std::size_t>& idx, std::size_t pos) {
    const std::size_t dims = x_.front().size();
    std::vector<std::size_t> features(dims);
    std::iota(features.begin(), features.end(), std::size_t{0});
    // Partial Fisher-Yates: the first mtry entries are a uniform draw.
    for (std::size_t i = 0; i < mtry_; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_.below(dims - i));
      std::swap(features[i], features[j]);
    }

    const std::size_t n = idx.size();
    const double parent = gini_impurity(pos, n);
    const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
    SplitChoice best;
    std::vector<std::pair<double, int>> column(n);
    for (std::size_t f = 0; f < mtry_; ++f) {
      const std::size_t feat = features[f];
      for (std::size_t i = 0; i < n; ++i) column[i] = {x_[idx[i]][feat], y_[idx[i]]};
      std::sort(column.begin(), column.end());
      std::size_t left_pos = 0;
      for (std::size_t i = 1; i < n; ++i) {
        left_pos += column[i - 1].second > 0 ? 1 : 0;
        if (i < min_leaf || n - i < min_leaf) continue;
        if (!(column[i - 1].first < column[i].first)) continue;
        const double wl = static_cast<double>(i) / static_cast<double>(n);
        const double child = wl * gini_impurity(left_pos, i) + (1.0 - wl) * gini_impurity(pos - left_pos, n - i);
        const double decrease = parent - child;
        if (decrease > best.decrease) {
          best.decrease = decrease;
          best.feature = static_cast<int>(feat);
          best.threshold = 0.5 * (column[i - 1].first + column[i].first);
        }
      }
    }
    return best;
  }

  std::span<const FeatureVector> x_;
  std::span<const int> y_;
  const ForestConfig& cfg_;
  std::size_t mtry_;
  Rng rng_;
  double total_ = 0.0;
  DecisionTree tree_;
};

}  // namespace

double gini_impurity(std::size_t positives, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

int DecisionTree::predict(std::span<const double> x) const {
  int id = 0;
  while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
    const auto& node = nodes[static_cast<std::size_t>(id)];
    id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(id)].label;
}

int RandomForest::predict(std::span<const double> x) const {
  if (x.size() != n_features)
    throw Error(Errc::DimensionMismatch, "forest expects " + std::to_string(n_features) + " features");
  long votes = 0;
  for (const auto& t : trees) votes += t.predict(x);
  return votes >= 0 ? 1 : -1;
}

RandomForest train_random_forest(std::span<const FeatureVector> features, std::span<const int> labels,
                                 const ForestConfig& cfg) {
  if (features.empty()) throw Error(Errc::EmptyDataset, "no training examples");
  if (features.size() != labels.size()) throw Error(Errc::DimensionMismatch, "features and labels differ in length");
  if (cfg.n_trees < 1 || cfg.max_depth < 1 || cfg.min_samples_leaf < 1 || cfg.features_per_split < 0)
    throw Error(Errc::InvalidConfig, "forest hyperparameters must be positive");
  const std::size_t dims = features.front().size();
  if (dims == 0) throw Error(Errc::DimensionMismatch, "feature vectors are empty");
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dims) throw Error(Errc::DimensionMismatch, "feature vectors differ in dimension");
    if (labels[i] != 1 && labels[i] != -1) throw Error(Errc::InvalidLabel, "labels must be -1 or +1");
    (labels[i] > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw Error(Errc::DegenerateLabels, "training data holds a single class");

  const std::size_t mtry = std::min(
      dims, cfg.features_per_split > 0 ? static_cast<std::size_t>(cfg.features_per_split)
                                       : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dims)))));

  RandomForest forest;
  forest.n_features = dims;
  forest.trees.reserve(static_cast<std::size_t>(cfg.n_trees));
  for (int t = 0; t < cfg.n_trees; ++t) {
    TreeGrower grower(features, labels, cfg, mtry,
                      derive_seed(cfg.seed, {stream_tag("tree"), static_cast<std::uint64_t>(t)}));
    forest.trees.push_back(grower.grow());
  }
  return forest;
}

std::vector<double> feature_importances(const RandomForest& forest) {
  const std::size_t dims = forest.n_features;
  std::vector<double> imp(dims, 0.0);
  std::vector<double> per_tree(forest.trees.size());
  for (std::size_t j = 0; j < dims; ++j) {
    for (std::size_t t = 0; t < forest.trees.size(); ++t) per_tree[t] = forest.trees[t].importance[j];
    // Sorted summation makes the result independent of tree order.
    std::sort(per_tree.begin(), per_tree.end());
    for (double v : per_tree) imp[j] += v;
    if (!forest.trees.empty()) imp[j] /= static_cast<double>(forest.trees.size());
  }
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (!(total > 0.0)) {
    std::fill(imp.begin(), imp.end(), dims ? 1.0 / static_cast<double>(dims) : 0.0);
    return imp;
  }
  for (double& v : imp) v /= total;
  return imp;
}

FeatureSelector select_features(const RandomForest& forest, std::size_t k) {
  if (k < 1 || k > forest.n_features)
    throw Error(Errc::InvalidK, "k=" + std::to_string(k) + " outside [1, " + std::to_string(forest.n_features) + "]");
  FeatureSelector sel;
  sel.importances = feature_importances(forest);
  std::vector<std::size_t> order(forest.n_features);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sel.importances[a] > sel.importances[b]; });
  sel.selected_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(sel.selected_indices.begin(), sel.selected_indices.end());
  return sel;
}

FeatureVector apply_selector(std::span<const double> v, const FeatureSelector& selector) {
  FeatureVector out;
  out.reserve(selector.selected_indices.size());
  for (auto i : selector.selected_indices) {
    if (i >= v.size())
      throw Error(Errc::DimensionMismatch, "selector index " + std::to_string(i) + " outside vector of length " +
                                               std::to_string(v.size()));
    out.push_back(v[i]);
  }
  return out;
}

}  // namespace cryfl
