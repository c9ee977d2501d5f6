#pragma once

#include <cstdint>
#include <vector>

#include "v2m/classifier.hpp"
#include "v2m/rng.hpp"

namespace v2m {

/// One node of a CART tree stored in a flat array. Leaves keep the majority
/// label (priority order breaks ties).
struct TreeNode {
  bool is_leaf = true;
  PriorityLabel leaf_label = PriorityLabel::Low;
  std::size_t feature = 0;
  double threshold = 0.0;  // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
};

struct TreeFitOptions {
  std::size_t max_depth = 12;
  std::size_t min_leaf = 2;
  // Random-forest hooks; a plain decision tree uses all features and no rng.
  std::size_t features_per_split = 0;  // 0 = all
  Rng* rng = nullptr;
};

/// CART with Gini impurity. Split scan is deterministic: features ascending,
/// candidate thresholds at midpoints of consecutive distinct values, first
/// best wins.
std::vector<TreeNode> build_tree(const Matrix& x,
                                 const std::vector<PriorityLabel>& y,
                                 const std::vector<std::size_t>& sample_indices,
                                 const TreeFitOptions& options);

PriorityLabel tree_predict(const std::vector<TreeNode>& nodes,
                           std::span<const double> x);

class DecisionTreeClassifier final : public TrainedClassifier {
 public:
  DecisionTreeClassifier(std::vector<TreeNode> nodes, std::size_t feature_dim)
      : nodes_(std::move(nodes)), feature_dim_(feature_dim) {}

  ModelKind kind() const noexcept override { return ModelKind::DecisionTree; }
  std::size_t feature_dim() const noexcept override { return feature_dim_; }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

 private:
  PriorityLabel do_predict(std::span<const double> x) const override {
    return tree_predict(nodes_, x);
  }

  std::vector<TreeNode> nodes_;
  std::size_t feature_dim_;
};

}  // namespace v2m
