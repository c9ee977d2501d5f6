#pragma once

#include <vector>

#include "v2m/classifier.hpp"

namespace v2m {

/// Multinomial softmax regression trained by full-batch gradient descent.
/// Weights are a 3 x d matrix plus per-class bias; the bias is not
/// L2-regularized.
class LogisticRegressionClassifier final : public TrainedClassifier {
 public:
  LogisticRegressionClassifier(Matrix weights, std::vector<double> bias,
                               std::vector<double> loss_trace)
      : weights_(std::move(weights)),
        bias_(std::move(bias)),
        loss_trace_(std::move(loss_trace)) {}

  ModelKind kind() const noexcept override { return ModelKind::LogisticRegression; }
  std::size_t feature_dim() const noexcept override { return weights_.cols; }

  const Matrix& weights() const noexcept { return weights_; }
  const std::vector<double>& bias() const noexcept { return bias_; }
  /// Per-epoch training loss (diagnostic, not serialized).
  const std::vector<double>& loss_trace() const noexcept { return loss_trace_; }

  std::array<double, kNumClasses> scores(std::span<const double> x) const;

 private:
  PriorityLabel do_predict(std::span<const double> x) const override;

  Matrix weights_;  // kNumClasses x d
  std::vector<double> bias_;
  std::vector<double> loss_trace_;
};

/// Mean cross-entropy of softmax(Wx+b) plus (l2/2)*||W||^2, with analytic
/// gradients. Exposed so tests can compare against finite differences.
double lr_loss_and_grad(const Matrix& x, const std::vector<PriorityLabel>& y,
                        const Matrix& weights, const std::vector<double>& bias,
                        double l2, Matrix* grad_w, std::vector<double>* grad_b);

}  // namespace v2m
