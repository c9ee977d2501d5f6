#include "v2m/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "v2m/errors.hpp"
#include "v2m/rng.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "dataset";

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

std::size_t nearest(const Matrix& centroids, std::span<const double> x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    const double dist = sq_dist(centroids.row(c), x);
    if (dist < best_d) {  // strict: lowest index wins ties
      best_d = dist;
      best = c;
    }
  }
  return best;
}

struct LloydResult {
  Matrix centroids;
  double objective = 0.0;
  std::vector<double> trace;
};

LloydResult lloyd_once(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows;
  const std::size_t dim = x.cols;

  // k-means++ seeding
  Matrix centroids(k, dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  {
    const std::size_t first = rng.index(n);
    for (std::size_t j = 0; j < dim; ++j) centroids(0, j) = x(first, j);
    for (std::size_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], sq_dist(x.row(i), centroids.row(c - 1)));
        total += d2[i];
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.index(n);
      }
      for (std::size_t j = 0; j < dim; ++j) centroids(c, j) = x(pick, j);
    }
  }

  std::vector<std::size_t> assignment(n, 0);
  LloydResult result;
  double prev_objective = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < 300; ++iter) {
    // assignment step
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      assignment[i] = nearest(centroids, x.row(i));
      objective += sq_dist(centroids.row(assignment[i]), x.row(i));
    }
    if (objective > prev_objective + 1e-9) {
      throw std::logic_error("kmeans objective increased within a restart");
    }
    result.trace.push_back(objective);
    result.objective = objective;

    // update step
    Matrix sums(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      counts[assignment[i]]++;
      for (std::size_t j = 0; j < dim; ++j) sums(assignment[i], j) += x(i, j);
    }
    Matrix next = centroids;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // reseed an empty cluster at the point farthest from its centroid
        double worst = -1.0;
        std::size_t worst_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const double dist = sq_dist(centroids.row(assignment[i]), x.row(i));
          if (dist > worst) {
            worst = dist;
            worst_i = i;
          }
        }
        for (std::size_t j = 0; j < dim; ++j) next(c, j) = x(worst_i, j);
      } else {
        for (std::size_t j = 0; j < dim; ++j) {
          next(c, j) = sums(c, j) / static_cast<double>(counts[c]);
        }
      }
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(sq_dist(next.row(c), centroids.row(c))));
    }
    centroids = std::move(next);
    prev_objective = objective;
    if (shift < 1e-6) break;
  }

  // final assignment so objective matches the returned centroids
  double objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    objective += sq_dist(centroids.row(nearest(centroids, x.row(i))), x.row(i));
  }
  result.objective = objective;
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace

std::size_t KMeansModel::assign(std::span<const double> x) const {
  if (x.size() != centroids.cols) {
    fail(Errc::DimensionMismatch, kModule,
         "point dimension does not match the fitted feature space");
  }
  return nearest(centroids, x);
}

KMeansModel kmeans_fit(const Dataset& d, std::size_t k, std::size_t restarts,
                       std::uint64_t seed) {
  if (d.empty()) {
    fail(Errc::InvalidArgument, kModule, "kmeans_fit on empty dataset");
  }
  if (k != kNumClasses) {
    fail(Errc::InvalidArgument, kModule, "k must be 3 for priority clustering");
  }
  if (restarts < 1) {
    fail(Errc::InvalidArgument, kModule, "restarts must be >= 1");
  }
  const Matrix x = d.standardized_matrix();

  std::set<std::vector<double>> distinct;
  for (std::size_t i = 0; i < x.rows && distinct.size() < k; ++i) {
    distinct.emplace(x.row(i).begin(), x.row(i).end());
  }
  if (distinct.size() < k) {
    fail(Errc::TooFewDistinctPoints, kModule,
         "need at least k distinct points to place k centroids");
  }

  LloydResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, "kmeans/restart/" + std::to_string(r)));
    LloydResult candidate = lloyd_once(x, k, rng);
    if (candidate.objective < best.objective) best = std::move(candidate);
  }

  KMeansModel model;
  model.k = k;
  model.centroids = std::move(best.centroids);
  model.objective = best.objective;
  model.objective_trace = std::move(best.trace);

  // order clusters by descending mean net demand: neediest becomes High
  std::vector<double> demand_sum(k, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::size_t c = nearest(model.centroids, x.row(i));
    demand_sum[c] += d.observations[i].net_demand_kw();
    counts[c]++;
  }
  std::vector<double> mean_demand(k);
  for (std::size_t c = 0; c < k; ++c) {
    mean_demand[c] = counts[c] > 0
                         ? demand_sum[c] / static_cast<double>(counts[c])
                         : -std::numeric_limits<double>::infinity();
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mean_demand[a] != mean_demand[b]) return mean_demand[a] > mean_demand[b];
    return a < b;
  });
  for (std::size_t rank = 0; rank < k; ++rank) {
    model.cluster_to_priority[order[rank]] = kAllLabels[rank];
  }
  return model;
}

Dataset label_dataset(const Dataset& d, const KMeansModel& m) {
  Dataset out = d;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.labels[i] = m.priority_of(d.standardized_row(i));
  }
  return out;
}

std::string serialize_kmeans(const KMeansModel& m) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = "kmeans";
  j["k"] = m.k;
  j["feature_dim"] = m.centroids.cols;
  j["centroids"] = m.centroids.data;
  nlohmann::json mapping = nlohmann::json::array();
  for (auto label : m.cluster_to_priority) mapping.push_back(to_string(label));
  j["cluster_to_priority"] = mapping;
  return j.dump(2) + "\n";
}

KMeansModel deserialize_kmeans(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("kind", "") != "kmeans" || j.value("format_version", 0) != 1) {
    fail(Errc::Io, kModule, "not a kmeans checkpoint");
  }
  KMeansModel m;
  m.k = j.at("k").get<std::size_t>();
  m.centroids.cols = j.at("feature_dim").get<std::size_t>();
  m.centroids.data = j.at("centroids").get<std::vector<double>>();
  m.centroids.rows = m.k;
  const auto mapping = j.at("cluster_to_priority");
  for (std::size_t c = 0; c < m.k && c < kNumClasses; ++c) {
    const auto label = priority_from_string(mapping.at(c).get<std::string>());
    if (!label) fail(Errc::Io, kModule, "bad label in kmeans checkpoint");
    m.cluster_to_priority[c] = *label;
  }
  return m;
}

}  // namespace v2m
