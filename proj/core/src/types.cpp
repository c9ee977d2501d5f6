#include "v2m/types.hpp"

#include <cmath>

#include "v2m/errors.hpp"

namespace v2m {

namespace {
constexpr std::string_view kModule = "dataset";
}

std::string_view to_string(PriorityLabel label) {
  switch (label) {
    case PriorityLabel::High: return "High";
    case PriorityLabel::Medium: return "Medium";
    case PriorityLabel::Low: return "Low";
  }
  return "?";
}

std::optional<PriorityLabel> priority_from_string(std::string_view s) {
  if (s == "High") return PriorityLabel::High;
  if (s == "Medium") return PriorityLabel::Medium;
  if (s == "Low") return PriorityLabel::Low;
  return std::nullopt;
}

std::string_view to_string(Provenance p) {
  return p == Provenance::Real ? "Real" : "Generated";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "Real") return Provenance::Real;
  if (s == "Generated") return Provenance::Generated;
  return std::nullopt;
}

void MicrogridObservation::validate() const {
  const auto nonneg_finite = [](double v) {
    return std::isfinite(v) && v >= 0.0;
  };
  if (!nonneg_finite(consumption_kw) || !nonneg_finite(pv_generation_kw) ||
      !nonneg_finite(wind_generation_kw) || !nonneg_finite(battery_capacity_kwh)) {
    fail(Errc::InvalidArgument, kModule,
         "power/energy fields must be finite and >= 0");
  }
  if (!std::isfinite(battery_soc_frac) || battery_soc_frac < 0.0 ||
      battery_soc_frac > 1.0) {
    fail(Errc::InvalidArgument, kModule, "battery_soc_frac must be in [0,1]");
  }
  if (hour_of_day < 0 || hour_of_day > 23) {
    fail(Errc::InvalidArgument, kModule, "hour_of_day must be in [0,23]");
  }
}

std::array<double, kFeatureDim> MicrogridObservation::features() const {
  return {consumption_kw,       pv_generation_kw, wind_generation_kw,
          battery_capacity_kwh, battery_soc_frac, static_cast<double>(hour_of_day)};
}

MicrogridObservation MicrogridObservation::from_features(std::span<const double> f) {
  if (f.size() != kFeatureDim) {
    fail(Errc::DimensionMismatch, kModule, "feature vector must have 6 entries");
  }
  MicrogridObservation obs;
  obs.consumption_kw = f[0];
  obs.pv_generation_kw = f[1];
  obs.wind_generation_kw = f[2];
  obs.battery_capacity_kwh = f[3];
  obs.battery_soc_frac = f[4];
  obs.hour_of_day = static_cast<int>(std::lround(f[5]));
  return obs;
}

std::vector<double> Normalizer::standardize(std::span<const double> raw) const {
  if (raw.size() != dim()) {
    fail(Errc::DimensionMismatch, kModule, "normalizer dimension mismatch");
  }
  std::vector<double> out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    out[j] = (raw[j] - mean[j]) / stddev[j];
  }
  return out;
}

std::vector<double> Normalizer::destandardize(std::span<const double> std_features) const {
  if (std_features.size() != dim()) {
    fail(Errc::DimensionMismatch, kModule, "normalizer dimension mismatch");
  }
  std::vector<double> out(std_features.size());
  for (std::size_t j = 0; j < std_features.size(); ++j) {
    out[j] = std_features[j] * stddev[j] + mean[j];
  }
  return out;
}

bool Dataset::fully_labeled() const {
  for (const auto& l : labels) {
    if (!l.has_value()) return false;
  }
  return true;
}

std::array<std::size_t, kNumClasses> Dataset::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& l : labels) {
    if (l.has_value()) counts[static_cast<std::size_t>(*l)]++;
  }
  return counts;
}

std::vector<double> Dataset::standardized_row(std::size_t i) const {
  if (!norm.has_value()) {
    fail(Errc::InvalidArgument, kModule, "dataset has no fitted normalizer");
  }
  const auto f = observations[i].features();
  return norm->standardize(f);
}

Matrix Dataset::standardized_matrix() const {
  if (!norm.has_value()) {
    fail(Errc::InvalidArgument, kModule, "dataset has no fitted normalizer");
  }
  Matrix m(size(), kFeatureDim);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto f = observations[i].features();
    const auto s = norm->standardize(f);
    for (std::size_t j = 0; j < kFeatureDim; ++j) m(i, j) = s[j];
  }
  return m;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.norm = norm;
  out.observations.reserve(indices.size());
  out.labels.reserve(indices.size());
  out.provenance.reserve(indices.size());
  for (std::size_t i : indices) {
    out.observations.push_back(observations[i]);
    out.labels.push_back(labels[i]);
    out.provenance.push_back(provenance[i]);
  }
  return out;
}

}  // namespace v2m
