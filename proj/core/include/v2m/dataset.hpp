#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "v2m/types.hpp"

namespace v2m {

/// Shape parameters for the synthetic microgrid trace generator. Defaults
/// describe a small neighborhood feeder with rooftop PV, a shared wind
/// turbine and per-site back-up batteries, sampled every 10 minutes.
struct ScenarioProfile {
  double base_consumption_kw = 18.0;   // overnight floor
  double consumption_peak_kw = 30.0;   // added morning/evening peak amplitude
  double consumption_noise_kw = 4.0;   // lognormal-ish jitter, stddev
  double pv_capacity_kw = 35.0;        // clear-sky midday output
  double pv_noise_frac = 0.20;         // cloud attenuation, fraction of output
  double wind_mean_kw = 12.0;
  double wind_gust_kw = 6.0;           // stddev of gust term
  double battery_capacity_min_kwh = 4.0;
  double battery_capacity_max_kwh = 48.0;

  /// Throws Errc::InvalidProfile when any bound is negative or min > max.
  void validate() const;
};

/// Synthesizes n observations with diurnal consumption/PV cycles, stochastic
/// wind and battery state. Deterministic for a fixed seed. Rows are unlabeled
/// with provenance Real.
Dataset generate_scenario(std::size_t n, std::uint64_t seed,
                          const ScenarioProfile& profile = {});

/// Column mapping for ingesting external CSVs: entry j names the column that
/// holds feature j (kFeatureNames order).
struct CsvSchema {
  std::array<std::string, kFeatureDim> columns = {
      "consumption_kw", "pv_generation_kw",    "wind_generation_kw",
      "battery_capacity_kwh", "battery_soc_frac", "hour_of_day"};
};

/// Reads an external CSV into an unlabeled Dataset (provenance all Real),
/// preserving row order. Errors: MissingColumn, ParseError(row, col),
/// EmptyFile.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Audit format: the six feature columns plus `label` and `provenance`.
/// Unlabeled rows serialize an empty label cell.
void save_dataset_csv(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset_csv(const std::filesystem::path& path);

/// Per-feature mean/stddev (population convention). Errors:
/// ZeroVarianceFeature(index) when a feature is constant.
Normalizer fit_normalizer(const Dataset& d);

/// Deterministic train/test partition. When stratified, per-class proportions
/// are preserved within one sample. Errors: ClassTooSmall under
/// stratification when a class has fewer than 2 samples.
std::pair<Dataset, Dataset> split(const Dataset& d, double train_frac,
                                  std::uint64_t seed, bool stratified);

/// Resamples a labeled dataset so class sizes are as equal as the total
/// allows (difference at most one). Oversamples with replacement,
/// undersamples without. Deterministic per seed.
Dataset rebalance_classes(const Dataset& d, std::size_t total, std::uint64_t seed);

}  // namespace v2m
