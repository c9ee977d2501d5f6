#pragma once

#include <vector>

#include "v2m/classifier.hpp"

namespace v2m {

/// Gaussian naive Bayes with per-class feature means/variances and log
/// priors. Variances are floored so a feature that is constant within a
/// class never divides by zero.
class NaiveBayesClassifier final : public TrainedClassifier {
 public:
  NaiveBayesClassifier(Matrix means, Matrix variances,
                       std::array<double, kNumClasses> log_priors)
      : means_(std::move(means)),
        variances_(std::move(variances)),
        log_priors_(log_priors) {}

  ModelKind kind() const noexcept override { return ModelKind::NaiveBayes; }
  std::size_t feature_dim() const noexcept override { return means_.cols; }

  const Matrix& means() const noexcept { return means_; }
  const Matrix& variances() const noexcept { return variances_; }
  const std::array<double, kNumClasses>& log_priors() const noexcept {
    return log_priors_;
  }

 private:
  PriorityLabel do_predict(std::span<const double> x) const override;

  Matrix means_;      // kNumClasses x d
  Matrix variances_;  // kNumClasses x d, floored
  std::array<double, kNumClasses> log_priors_;
};

}  // namespace v2m
