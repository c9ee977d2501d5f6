#include "v2m/linear_svm.hpp"

namespace v2m {

std::array<double, kNumClasses> LinearSvmClassifier::scores(
    std::span<const double> x) const {
  std::array<double, kNumClasses> margins{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double s = bias_[c];
    const auto w = weights_.row(c);
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
    margins[c] = s;
  }
  return margins;
}

PriorityLabel LinearSvmClassifier::do_predict(std::span<const double> x) const {
  const auto margins = scores(x);
  return static_cast<PriorityLabel>(argmax_score(margins));
}

double svm_loss_and_grad(const Matrix& x, const std::vector<PriorityLabel>& y,
                         PriorityLabel positive, std::span<const double> w,
                         double b, double lambda, std::vector<double>* grad_w,
                         double* grad_b) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const double inv_n = 1.0 / static_cast<double>(n);

  if (grad_w != nullptr) grad_w->assign(d, 0.0);
  if (grad_b != nullptr) *grad_b = 0.0;

  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = y[i] == positive ? 1.0 : -1.0;
    const auto xi = x.row(i);
    double score = b;
    for (std::size_t j = 0; j < d; ++j) score += w[j] * xi[j];
    const double margin = target * score;
    if (margin < 1.0) {
      loss += (1.0 - margin) * inv_n;
      if (grad_w != nullptr) {
        for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] -= target * xi[j] * inv_n;
      }
      if (grad_b != nullptr) *grad_b -= target * inv_n;
    }
  }

  double reg = 0.0;
  for (std::size_t j = 0; j < d; ++j) reg += w[j] * w[j];
  loss += 0.5 * lambda * reg;
  if (grad_w != nullptr) {
    for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] += lambda * w[j];
  }
  return loss;
}

}  // namespace v2m
