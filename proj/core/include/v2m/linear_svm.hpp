#pragma once

#include <vector>

#include "v2m/classifier.hpp"

namespace v2m {

/// Linear one-vs-rest SVM trained by full-batch subgradient descent on
/// J(w,b) = (lambda/2)||w||^2 + mean hinge, lambda = 1/(C*n). Prediction is
/// the class with the largest margin score.
class LinearSvmClassifier final : public TrainedClassifier {
 public:
  LinearSvmClassifier(Matrix weights, std::vector<double> bias)
      : weights_(std::move(weights)), bias_(std::move(bias)) {}

  ModelKind kind() const noexcept override { return ModelKind::SupportVectorMachine; }
  std::size_t feature_dim() const noexcept override { return weights_.cols; }

  const Matrix& weights() const noexcept { return weights_; }
  const std::vector<double>& bias() const noexcept { return bias_; }

  std::array<double, kNumClasses> scores(std::span<const double> x) const;

 private:
  PriorityLabel do_predict(std::span<const double> x) const override;

  Matrix weights_;  // kNumClasses x d, one binary machine per class
  std::vector<double> bias_;
};

/// Hinge objective and subgradient for one binary one-vs-rest machine.
/// `positive` marks the rows treated as +1. Exposed for the finite-difference
/// check (valid away from hinge kinks).
double svm_loss_and_grad(const Matrix& x, const std::vector<PriorityLabel>& y,
                         PriorityLabel positive, std::span<const double> w,
                         double b, double lambda, std::vector<double>* grad_w,
                         double* grad_b);

}  // namespace v2m
