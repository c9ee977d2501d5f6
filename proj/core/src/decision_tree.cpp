#include "v2m/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace v2m {

namespace {

std::array<std::size_t, kNumClasses> count_classes(
    const std::vector<PriorityLabel>& y, const std::vector<std::size_t>& idx) {
  std::array<std::size_t, kNumClasses> counts{};
  for (std::size_t i : idx) counts[static_cast<std::size_t>(y[i])]++;
  return counts;
}

double gini(const std::array<std::size_t, kNumClasses>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

PriorityLabel majority(const std::array<std::size_t, kNumClasses>& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (counts[c] > counts[best]) best = c;  // ties keep the higher priority
  }
  return static_cast<PriorityLabel>(best);
}

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

struct Builder {
  const Matrix& x;
  const std::vector<PriorityLabel>& y;
  const TreeFitOptions& options;
  std::vector<TreeNode> nodes;

  std::int32_t grow(std::vector<std::size_t> idx, std::size_t depth) {
    const auto counts = count_classes(y, idx);
    const double node_gini = gini(counts, idx.size());

    const auto make_leaf = [&]() {
      TreeNode leaf;
      leaf.is_leaf = true;
      leaf.leaf_label = majority(counts);
      nodes.push_back(leaf);
      return static_cast<std::int32_t>(nodes.size() - 1);
    };

    if (node_gini == 0.0 || depth >= options.max_depth ||
        idx.size() < 2 * options.min_leaf) {
      return make_leaf();
    }

    const SplitChoice split = best_split(idx, counts, node_gini);
    if (!split.found) return make_leaf();

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : idx) {
      (x(i, split.feature) <= split.threshold ? left_idx : right_idx).push_back(i);
    }

    const auto node_at = static_cast<std::int32_t>(nodes.size());
    TreeNode node;
    node.is_leaf = false;
    node.feature = split.feature;
    node.threshold = split.threshold;
    nodes.push_back(node);
    idx.clear();
    idx.shrink_to_fit();
    const std::int32_t left = grow(std::move(left_idx), depth + 1);
    const std::int32_t right = grow(std::move(right_idx), depth + 1);
    nodes[node_at].left = left;
    nodes[node_at].right = right;
    return node_at;
  }

  SplitChoice best_split(const std::vector<std::size_t>& idx,
                         const std::array<std::size_t, kNumClasses>& counts,
                         double node_gini) {
    SplitChoice best;
    const std::size_t n = idx.size();

    std::vector<std::size_t> features(x.cols);
    std::iota(features.begin(), features.end(), 0);
    if (options.features_per_split > 0 && options.features_per_split < x.cols &&
        options.rng != nullptr) {
      options.rng->shuffle(features);
      features.resize(options.features_per_split);
      std::sort(features.begin(), features.end());
    }

    std::vector<std::pair<double, PriorityLabel>> column(n);
    for (std::size_t f : features) {
      for (std::size_t i = 0; i < n; ++i) {
        column[i] = {x(idx[i], f), y[idx[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::array<std::size_t, kNumClasses> left_counts{};
      std::size_t n_left = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_counts[static_cast<std::size_t>(column[i].second)]++;
        n_left++;
        if (column[i].first == column[i + 1].first) continue;
        if (n_left < options.min_leaf || n - n_left < options.min_leaf) continue;

        std::array<std::size_t, kNumClasses> right_counts{};
        for (std::size_t c = 0; c < kNumClasses; ++c) {
          right_counts[c] = counts[c] - left_counts[c];
        }
        const double weighted =
            (static_cast<double>(n_left) * gini(left_counts, n_left) +
             static_cast<double>(n - n_left) * gini(right_counts, n - n_left)) /
            static_cast<double>(n);
        const double gain = node_gini - weighted;
        if (gain > best.gain + 1e-15) {  // strictly better; first best wins
          best.found = gain > 1e-12;
          best.feature = f;
          best.threshold = column[i].first +
                           0.5 * (column[i + 1].first - column[i].first);
          best.gain = gain;
        }
      }
    }
    return best;
  }
};

}  // namespace

std::vector<TreeNode> build_tree(const Matrix& x,
                                 const std::vector<PriorityLabel>& y,
                                 const std::vector<std::size_t>& sample_indices,
                                 const TreeFitOptions& options) {
  Builder builder{x, y, options, {}};
  builder.grow(sample_indices, 0);
  return std::move(builder.nodes);
}

PriorityLabel tree_predict(const std::vector<TreeNode>& nodes,
                           std::span<const double> x) {
  std::size_t at = 0;
  while (!nodes[at].is_leaf) {
    at = static_cast<std::size_t>(x[nodes[at].feature] <= nodes[at].threshold
                                      ? nodes[at].left
                                      : nodes[at].right);
  }
  return nodes[at].leaf_label;
}

}  // namespace v2m
