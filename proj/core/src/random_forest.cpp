#include "v2m/random_forest.hpp"

namespace v2m {

PriorityLabel RandomForestClassifier::do_predict(std::span<const double> x) const {
  std::array<std::size_t, kNumClasses> votes{};
  for (const auto& tree : trees_) {
    votes[static_cast<std::size_t>(tree_predict(tree, x))]++;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (votes[c] > votes[best]) best = c;  // ties keep the higher priority
  }
  return static_cast<PriorityLabel>(best);
}

}  // namespace v2m
