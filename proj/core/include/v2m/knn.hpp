#pragma once

#include "v2m/classifier.hpp"

namespace v2m {

/// K-nearest-neighbors on standardized features with Euclidean distance.
/// Vote ties break by smaller aggregate distance of the voting neighbors,
/// then by higher priority. Neighbor order is (distance, training index).
class KnnClassifier final : public TrainedClassifier {
 public:
  KnnClassifier(Matrix train_x, std::vector<PriorityLabel> train_y, std::size_t k);

  ModelKind kind() const noexcept override { return ModelKind::KNearestNeighbors; }
  std::size_t feature_dim() const noexcept override { return train_x_.cols; }

  std::size_t k() const noexcept { return k_; }
  const Matrix& train_x() const noexcept { return train_x_; }
  const std::vector<PriorityLabel>& train_y() const noexcept { return train_y_; }

 private:
  PriorityLabel do_predict(std::span<const double> x) const override;

  Matrix train_x_;
  std::vector<PriorityLabel> train_y_;
  std::size_t k_;
};

}  // namespace v2m
