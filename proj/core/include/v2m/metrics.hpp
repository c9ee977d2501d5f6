#pragma once

#include <array>
#include <cstdint>

#include "v2m/types.hpp"

namespace v2m {

/// Confusion-matrix derived metrics for the three-class problem.
/// Rows of `confusion` are true labels, columns predictions. F1 is 0 for a
/// class with no true positives; macro_f1 is the unweighted mean over classes.
struct MetricsReport {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> confusion{};
  std::uint64_t total = 0;
  double accuracy = 0.0;
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  double macro_f1 = 0.0;
};

MetricsReport metrics_from_confusion(
    const std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>& confusion);

/// Lexicographic (accuracy, macro_f1) comparison used for surrogate selection.
bool metrics_better(const MetricsReport& a, const MetricsReport& b);

}  // namespace v2m
