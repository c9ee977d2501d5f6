#include "v2m/logistic_regression.hpp"

#include <algorithm>
#include <cmath>

namespace v2m {

std::array<double, kNumClasses> LogisticRegressionClassifier::scores(
    std::span<const double> x) const {
  std::array<double, kNumClasses> logits{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double s = bias_[c];
    const auto w = weights_.row(c);
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
    logits[c] = s;
  }
  return logits;
}

PriorityLabel LogisticRegressionClassifier::do_predict(
    std::span<const double> x) const {
  const auto logits = scores(x);
  return static_cast<PriorityLabel>(argmax_score(logits));
}

double lr_loss_and_grad(const Matrix& x, const std::vector<PriorityLabel>& y,
                        const Matrix& weights, const std::vector<double>& bias,
                        double l2, Matrix* grad_w, std::vector<double>* grad_b) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const double inv_n = 1.0 / static_cast<double>(n);

  if (grad_w != nullptr) *grad_w = Matrix(kNumClasses, d);
  if (grad_b != nullptr) grad_b->assign(kNumClasses, 0.0);

  double loss = 0.0;
  std::array<double, kNumClasses> logits{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      double s = bias[c];
      const auto w = weights.row(c);
      for (std::size_t j = 0; j < d; ++j) s += w[j] * xi[j];
      logits[c] = s;
    }
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - max_logit);
    const std::size_t target = static_cast<std::size_t>(y[i]);
    loss -= (logits[target] - max_logit - std::log(z)) * inv_n;

    if (grad_w != nullptr || grad_b != nullptr) {
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        const double p = std::exp(logits[c] - max_logit) / z;
        const double delta = (p - (c == target ? 1.0 : 0.0)) * inv_n;
        if (grad_b != nullptr) (*grad_b)[c] += delta;
        if (grad_w != nullptr) {
          auto g = grad_w->row(c);
          for (std::size_t j = 0; j < d; ++j) g[j] += delta * xi[j];
        }
      }
    }
  }

  // L2 on weights only
  double reg = 0.0;
  for (double w : weights.data) reg += w * w;
  loss += 0.5 * l2 * reg;
  if (grad_w != nullptr) {
    for (std::size_t i = 0; i < grad_w->data.size(); ++i) {
      grad_w->data[i] += l2 * weights.data[i];
    }
  }
  return loss;
}

}  // namespace v2m
