#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cryfl/features.hpp"

namespace cryfl {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 8;
  int min_samples_leaf = 2;
  int features_per_split = 0;  // 0 means ceil(sqrt(D))
  std::uint64_t seed = 0;
};

// Binary CART tree over labels in {-1, +1}, stored as a flat node array.
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 1;
  };

  std::vector<Node> nodes;
  // Sum over split nodes of (node_samples / bootstrap_size) * impurity decrease.
  std::vector<double> importance;

  int predict(std::span<const double> x) const;
};

struct RandomForest {
  std::size_t n_features = 0;
  std::vector<DecisionTree> trees;

  // Majority vote; ties go to +1.
  int predict(std::span<const double> x) const;
};

// Trees are grown from independent RNG streams derived from (seed, tree
// index), so the result does not depend on growth order.
RandomForest train_random_forest(std::span<const FeatureVector> features, std::span<const int> labels,
                                 const ForestConfig& cfg = {});

double gini_impurity(std::size_t positives, std::size_t total);

struct FeatureSelector {
  std::vector<std::size_t> selected_indices;  // strictly increasing
  std::vector<double> importances;            // one per source feature, sums to 1
};

// Mean decrease in impurity per feature, normalized to sum 1. Uniform when
// no tree made a split.
std::vector<double> feature_importances(const RandomForest& forest);

FeatureSelector select_features(const RandomForest& forest, std::size_t k);

FeatureVector apply_selector(std::span<const double> v, const FeatureSelector& selector);

}  // namespace cryfl
