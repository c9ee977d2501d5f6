#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "v2m/matrix.hpp"

namespace v2m {

/// Request priority assigned to a microgrid energy request. Ordered by energy
/// necessity: High > Medium > Low. The numeric value doubles as the class
/// index everywhere (confusion matrices, model outputs, embeddings).
enum class PriorityLabel : std::uint8_t { High = 0, Medium = 1, Low = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<PriorityLabel, kNumClasses> kAllLabels = {
    PriorityLabel::High, PriorityLabel::Medium, PriorityLabel::Low};

std::string_view to_string(PriorityLabel label);
std::optional<PriorityLabel> priority_from_string(std::string_view s);

/// True if `a` outranks `b` in energy necessity (High outranks Medium, ...).
inline bool higher_priority(PriorityLabel a, PriorityLabel b) {
  return static_cast<int>(a) < static_cast<int>(b);
}

enum class Provenance : std::uint8_t { Real = 0, Generated = 1 };

std::string_view to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

inline constexpr std::size_t kFeatureDim = 6;

/// Canonical feature order used by every matrix/CSV in the project.
inline constexpr std::array<std::string_view, kFeatureDim> kFeatureNames = {
    "consumption_kw", "pv_generation_kw",    "wind_generation_kw",
    "battery_capacity_kwh", "battery_soc_frac", "hour_of_day"};

/// One energy-request feature vector: aggregated household demand, local
/// generation, back-up battery state and time of day.
struct MicrogridObservation {
  double consumption_kw = 0.0;
  double pv_generation_kw = 0.0;
  double wind_generation_kw = 0.0;
  double battery_capacity_kwh = 0.0;
  double battery_soc_frac = 0.0;
  int hour_of_day = 0;

  /// Throws Errc::InvalidArgument when an invariant is broken: power/energy
  /// fields must be finite and >= 0, soc in [0,1], hour in [0,23].
  void validate() const;

  std::array<double, kFeatureDim> features() const;
  static MicrogridObservation from_features(std::span<const double> f);

  /// Net energy demand in kW assuming requests cover a one-hour horizon:
  /// consumption minus local generation minus dispatchable battery energy.
  double net_demand_kw() const {
    return consumption_kw - (pv_generation_kw + wind_generation_kw) -
           battery_capacity_kwh * battery_soc_frac;
  }
};

/// Per-feature standardization statistics (population stddev, divide by n).
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t dim() const { return mean.size(); }
  std::vector<double> standardize(std::span<const double> raw) const;
  std::vector<double> destandardize(std::span<const double> std_features) const;
};

/// Ordered collection of observations with parallel label and provenance
/// lists, plus the standardization statistics fitted for this data.
struct Dataset {
  std::vector<MicrogridObservation> observations;
  std::vector<std::optional<PriorityLabel>> labels;
  std::vector<Provenance> provenance;
  std::optional<Normalizer> norm;

  std::size_t size() const { return observations.size(); }
  bool empty() const { return observations.empty(); }

  void push_back(const MicrogridObservation& obs,
                 std::optional<PriorityLabel> label = std::nullopt,
                 Provenance prov = Provenance::Real) {
    observations.push_back(obs);
    labels.push_back(label);
    provenance.push_back(prov);
  }

  bool fully_labeled() const;
  std::array<std::size_t, kNumClasses> class_counts() const;

  /// Standardized feature row; requires a fitted normalizer.
  std::vector<double> standardized_row(std::size_t i) const;

  /// n x 6 matrix of standardized features; requires a fitted normalizer.
  Matrix standardized_matrix() const;

  /// Subset by row indices, preserving order and the normalizer.
  Dataset subset(std::span<const std::size_t> indices) const;
};

}  // namespace v2m
