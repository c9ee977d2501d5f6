#include "v2m/metrics.hpp"

namespace v2m {

MetricsReport metrics_from_confusion(
    const std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>& confusion) {
  MetricsReport r;
  r.confusion = confusion;

  std::uint64_t diag = 0;
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    for (std::size_t p = 0; p < kNumClasses; ++p) r.total += confusion[t][p];
    diag += confusion[t][t];
  }
  r.accuracy = r.total > 0 ? static_cast<double>(diag) / static_cast<double>(r.total)
                           : 0.0;

  double f1_sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::uint64_t tp = confusion[c][c];
    std::uint64_t fp = 0, fn = 0;
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      if (o == c) continue;
      fp += confusion[o][c];
      fn += confusion[c][o];
    }
    r.precision[c] = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall[c] = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.f1[c] = (r.precision[c] + r.recall[c]) > 0.0
                  ? 2.0 * r.precision[c] * r.recall[c] / (r.precision[c] + r.recall[c])
                  : 0.0;
    f1_sum += r.f1[c];
  }
  r.macro_f1 = f1_sum / static_cast<double>(kNumClasses);
  return r;
}

bool metrics_better(const MetricsReport& a, const MetricsReport& b) {
  if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  return a.macro_f1 > b.macro_f1;
}

}  // namespace v2m
