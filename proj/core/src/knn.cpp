#include "v2m/knn.hpp"

#include <algorithm>
#include <cmath>

#include "v2m/errors.hpp"

namespace v2m {

KnnClassifier::KnnClassifier(Matrix train_x, std::vector<PriorityLabel> train_y,
                             std::size_t k)
    : train_x_(std::move(train_x)), train_y_(std::move(train_y)), k_(k) {}

PriorityLabel KnnClassifier::do_predict(std::span<const double> x) const {
  const std::size_t n = train_x_.rows;
  const std::size_t k = std::min(k_, n);

  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const auto row = train_x_.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double diff = row[j] - x[j];
      s += diff * diff;
    }
    dist[i] = {s, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  std::array<std::size_t, kNumClasses> votes{};
  std::array<double, kNumClasses> vote_dist{};
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = static_cast<std::size_t>(train_y_[dist[i].second]);
    votes[c]++;
    vote_dist[c] += std::sqrt(dist[i].first);
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (votes[c] > votes[best]) {
      best = c;
    } else if (votes[c] == votes[best] && votes[c] > 0) {
      if (vote_dist[c] < vote_dist[best]) best = c;
      // equal votes and equal aggregate distance: keep the lower index,
      // which is the higher priority
    }
  }
  return static_cast<PriorityLabel>(best);
}

}  // namespace v2m
