#include <benchmark/benchmark.h>

#include "v2m/adversary.hpp"
#include "v2m/cgan.hpp"
#include "v2m/classifier.hpp"
#include "v2m/dataset.hpp"
#include "v2m/kmeans.hpp"

namespace {

v2m::Dataset benchmark_dataset(std::size_t n) {
  v2m::Dataset d = v2m::generate_scenario(n, 7);
  d.norm = v2m::fit_normalizer(d);
  const auto kmeans = v2m::kmeans_fit(d, 3, 4, 7);
  return v2m::label_dataset(d, kmeans);
}

void BM_KMeansFit(benchmark::State& state) {
  v2m::Dataset d = v2m::generate_scenario(static_cast<std::size_t>(state.range(0)), 7);
  d.norm = v2m::fit_normalizer(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(v2m::kmeans_fit(d, 3, 10, 7));
  }
}
BENCHMARK(BM_KMeansFit)->Arg(2000);

void BM_KnnPredict(benchmark::State& state) {
  const v2m::Dataset d = benchmark_dataset(2000);
  const auto model = v2m::fit_classifier(v2m::ModelKind::KNearestNeighbors, d);
  const auto query = d.standardized_row(42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model->predict(query));
  }
}
BENCHMARK(BM_KnnPredict);

void BM_ForestFit(benchmark::State& state) {
  const v2m::Dataset d = benchmark_dataset(2000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(v2m::fit_classifier(v2m::ModelKind::RandomForest, d));
  }
}
BENCHMARK(BM_ForestFit);

void BM_CganTrainStep(benchmark::State& state) {
  v2m::CganConfig config;
  config.seed = 7;
  v2m::CganModel model = v2m::cgan_init(config, v2m::kFeatureDim);
  model.scaler.lo.assign(v2m::kFeatureDim, 0.0);
  model.scaler.hi.assign(v2m::kFeatureDim, 1.0);

  const std::size_t half = config.batch_size / 2;
  v2m::Matrix real(half, v2m::kFeatureDim);
  v2m::Rng rng(11);
  for (double& v : real.data) v = rng.uniform(-1.0, 1.0);
  std::vector<v2m::PriorityLabel> labels(half);
  for (std::size_t i = 0; i < half; ++i) labels[i] = v2m::kAllLabels[i % 3];

  for (auto _ : state) {
    benchmark::DoNotOptimize(v2m::cgan_train_step(model, real, labels, rng));
  }
}
BENCHMARK(BM_CganTrainStep);

void BM_CraftEvasion(benchmark::State& state) {
  const v2m::Dataset d = benchmark_dataset(2000);
  const auto surrogate = v2m::fit_classifier(v2m::ModelKind::KNearestNeighbors, d);

  std::vector<std::size_t> low_rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (*d.labels[i] == v2m::PriorityLabel::Low) low_rows.push_back(i);
  }
  v2m::Matrix prototypes(low_rows.size(), v2m::kFeatureDim);
  for (std::size_t r = 0; r < low_rows.size(); ++r) {
    const auto row = d.standardized_row(low_rows[r]);
    std::copy(row.begin(), row.end(), prototypes.row(r).begin());
  }

  std::size_t high_row = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (*d.labels[i] == v2m::PriorityLabel::High) {
      high_row = i;
      break;
    }
  }
  const auto victim = d.standardized_row(high_row);
  const v2m::EvasionAttackConfig config;

  for (auto _ : state) {
    benchmark::DoNotOptimize(
        v2m::craft_evasion(victim, *surrogate, prototypes, config));
  }
}
BENCHMARK(BM_CraftEvasion);

}  // namespace

BENCHMARK_MAIN();
