#pragma once

#include <vector>

#include "v2m/decision_tree.hpp"

namespace v2m {

/// Bagged CART ensemble. Each tree gets its own bootstrap sample and rng
/// stream derived from the fit seed; majority vote over trees, vote ties
/// resolved toward higher priority. With one tree and both bagging knobs
/// off this reduces exactly to DecisionTreeClassifier.
class RandomForestClassifier final : public TrainedClassifier {
 public:
  RandomForestClassifier(std::vector<std::vector<TreeNode>> trees,
                         std::size_t feature_dim)
      : trees_(std::move(trees)), feature_dim_(feature_dim) {}

  ModelKind kind() const noexcept override { return ModelKind::RandomForest; }
  std::size_t feature_dim() const noexcept override { return feature_dim_; }

  const std::vector<std::vector<TreeNode>>& trees() const noexcept { return trees_; }

 private:
  PriorityLabel do_predict(std::span<const double> x) const override;

  std::vector<std::vector<TreeNode>> trees_;
  std::size_t feature_dim_;
};

}  // namespace v2m
