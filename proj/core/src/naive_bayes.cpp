#include "v2m/naive_bayes.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace v2m {

PriorityLabel NaiveBayesClassifier::do_predict(std::span<const double> x) const {
  std::array<double, kNumClasses> log_post{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double lp = log_priors_[c];
    if (lp == -std::numeric_limits<double>::infinity()) {
      log_post[c] = lp;
      continue;
    }
    for (std::size_t j = 0; j < means_.cols; ++j) {
      const double var = variances_(c, j);
      const double dev = x[j] - means_(c, j);
      lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - dev * dev / (2.0 * var);
    }
    log_post[c] = lp;
  }
  return static_cast<PriorityLabel>(argmax_score(log_post));
}

}  // namespace v2m
