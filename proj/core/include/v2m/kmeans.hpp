#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "v2m/types.hpp"

namespace v2m {

/// K-means model over standardized features. Clusters map bijectively onto
/// priorities by descending mean net demand of their members: the neediest
/// cluster is High.
struct KMeansModel {
  std::size_t k = kNumClasses;
  Matrix centroids;  // k x feature_dim, standardized space
  std::array<PriorityLabel, kNumClasses> cluster_to_priority{
      PriorityLabel::High, PriorityLabel::Medium, PriorityLabel::Low};

  // Diagnostics from the winning restart (not serialized).
  double objective = 0.0;
  std::vector<double> objective_trace;

  /// Nearest-centroid cluster index; ties resolved to the lowest index.
  /// Throws DimensionMismatch when x's length differs from the centroids'.
  std::size_t assign(std::span<const double> x) const;

  PriorityLabel priority_of(std::span<const double> x) const {
    return cluster_to_priority[assign(x)];
  }
};

/// Lloyd's algorithm with k-means++ seeding. Keeps the restart with the
/// lowest within-cluster sum of squares; each restart draws an independent
/// stream derived from `seed`. The dataset must carry a fitted normalizer.
/// Errors: TooFewDistinctPoints when distinct rows < k.
KMeansModel kmeans_fit(const Dataset& d, std::size_t k = kNumClasses,
                       std::size_t restarts = 10, std::uint64_t seed = 0);

/// Labels every observation via nearest centroid; provenance untouched.
Dataset label_dataset(const Dataset& d, const KMeansModel& m);

std::string serialize_kmeans(const KMeansModel& m);
KMeansModel deserialize_kmeans(const std::string& text);

}  // namespace v2m
