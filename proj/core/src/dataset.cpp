#include "v2m/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "v2m/csv.hpp"
#include "v2m/errors.hpp"
#include "v2m/rng.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "dataset";

/// Demand shape over the day: overnight floor with morning and evening peaks.
double diurnal_demand_factor(int hour) {
  const double h = static_cast<double>(hour);
  const double morning = std::exp(-0.5 * std::pow((h - 8.0) / 2.0, 2.0));
  const double evening = std::exp(-0.5 * std::pow((h - 19.0) / 2.5, 2.0));
  return morning + evening;
}

/// Clear-sky PV shape: zero at night, sine arc between 06:00 and 18:00.
double pv_shape(int hour) {
  if (hour < 6 || hour > 18) return 0.0;
  return std::sin(std::numbers::pi * (hour - 6) / 12.0);
}

}  // namespace

void ScenarioProfile::validate() const {
  const double bounds[] = {base_consumption_kw,  consumption_peak_kw,
                           consumption_noise_kw, pv_capacity_kw,
                           pv_noise_frac,        wind_mean_kw,
                           wind_gust_kw,         battery_capacity_min_kwh,
                           battery_capacity_max_kwh};
  for (double b : bounds) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      fail(Errc::InvalidProfile, kModule, "profile bounds must be nonnegative");
    }
  }
  if (battery_capacity_min_kwh > battery_capacity_max_kwh) {
    fail(Errc::InvalidProfile, kModule,
         "battery capacity min exceeds max");
  }
}

Dataset generate_scenario(std::size_t n, std::uint64_t seed,
                          const ScenarioProfile& profile) {
  if (n < 1) {
    fail(Errc::InvalidArgument, kModule, "n must be >= 1");
  }
  profile.validate();
  Rng rng(seed);
  Dataset d;
  d.observations.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    MicrogridObservation obs;
    // 10-minute sampling: six samples per hour, wrapping daily
    obs.hour_of_day = static_cast<int>((i / 6) % 24);

    const double demand = profile.base_consumption_kw +
                          profile.consumption_peak_kw *
                              diurnal_demand_factor(obs.hour_of_day) +
                          profile.consumption_noise_kw * rng.normal();
    obs.consumption_kw = std::max(0.0, demand);

    const double pv = profile.pv_capacity_kw * pv_shape(obs.hour_of_day) *
                      (1.0 - profile.pv_noise_frac * rng.uniform());
    obs.pv_generation_kw = std::max(0.0, pv);

    const double wind = profile.wind_mean_kw + profile.wind_gust_kw * rng.normal();
    obs.wind_generation_kw = std::max(0.0, wind);

    obs.battery_capacity_kwh = rng.uniform(profile.battery_capacity_min_kwh,
                                           profile.battery_capacity_max_kwh);
    obs.battery_soc_frac = rng.uniform();

    obs.validate();
    d.push_back(obs);
  }
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  const CsvTable table = read_csv_file(path);
  if (table.rows.empty()) {
    fail(Errc::EmptyFile, kModule, "no data rows in " + path.string());
  }

  std::array<std::size_t, kFeatureDim> col_index{};
  for (std::size_t j = 0; j < kFeatureDim; ++j) {
    const auto it =
        std::find(table.header.begin(), table.header.end(), schema.columns[j]);
    if (it == table.header.end()) {
      fail(Errc::MissingColumn, kModule,
           "missing column '" + schema.columns[j] + "'");
    }
    col_index[j] = static_cast<std::size_t>(it - table.header.begin());
  }

  Dataset d;
  d.observations.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::array<double, kFeatureDim> f{};
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      if (col_index[j] >= row.size() || !parse_double(row[col_index[j]], f[j])) {
        std::ostringstream msg;
        msg << "unparseable value in row " << (r + 1) << ", column '"
            << schema.columns[j] << "'";
        fail(Errc::ParseError, kModule, msg.str());
      }
    }
    MicrogridObservation obs = MicrogridObservation::from_features(f);
    obs.validate();
    d.push_back(obs);
  }
  return d;
}

void save_dataset_csv(const Dataset& d, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t j = 0; j < kFeatureDim; ++j) {
    out += kFeatureNames[j];
    out += ',';
  }
  out += "label,provenance\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto f = d.observations[i].features();
    for (double v : f) {
      out += format_double(v);
      out += ',';
    }
    if (d.labels[i].has_value()) out += to_string(*d.labels[i]);
    out += ',';
    out += to_string(d.provenance[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  Dataset d = load_csv(path);
  const CsvTable table = read_csv_file(path);
  const auto label_it = std::find(table.header.begin(), table.header.end(), "label");
  const auto prov_it =
      std::find(table.header.begin(), table.header.end(), "provenance");
  if (label_it != table.header.end()) {
    const std::size_t col = static_cast<std::size_t>(label_it - table.header.begin());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const std::string& cell = table.rows[i][col];
      if (!cell.empty()) d.labels[i] = priority_from_string(cell);
    }
  }
  if (prov_it != table.header.end()) {
    const std::size_t col = static_cast<std::size_t>(prov_it - table.header.begin());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (auto p = provenance_from_string(table.rows[i][col])) d.provenance[i] = *p;
    }
  }
  return d;
}

Normalizer fit_normalizer(const Dataset& d) {
  if (d.empty()) {
    fail(Errc::InvalidArgument, kModule, "cannot fit normalizer on empty dataset");
  }
  const std::size_t n = d.size();
  Normalizer norm;
  norm.mean.assign(kFeatureDim, 0.0);
  norm.stddev.assign(kFeatureDim, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const auto f = d.observations[i].features();
    for (std::size_t j = 0; j < kFeatureDim; ++j) norm.mean[j] += f[j];
  }
  for (std::size_t j = 0; j < kFeatureDim; ++j) norm.mean[j] /= static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto f = d.observations[i].features();
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      const double dev = f[j] - norm.mean[j];
      norm.stddev[j] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < kFeatureDim; ++j) {
    norm.stddev[j] = std::sqrt(norm.stddev[j] / static_cast<double>(n));
    if (norm.stddev[j] <= 0.0) {
      std::ostringstream msg;
      msg << "feature " << j << " (" << kFeatureNames[j] << ") has zero variance";
      fail(Errc::ZeroVarianceFeature, kModule, msg.str());
    }
  }
  return norm;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_frac,
                                  std::uint64_t seed, bool stratified) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    fail(Errc::InvalidArgument, kModule, "train_frac must be in (0,1)");
  }
  if (!d.fully_labeled()) {
    fail(Errc::InvalidArgument, kModule, "split requires a labeled dataset");
  }
  Rng rng(seed);
  std::vector<std::size_t> train_idx, test_idx;

  if (stratified) {
    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    for (std::size_t i = 0; i < d.size(); ++i) {
      by_class[static_cast<std::size_t>(*d.labels[i])].push_back(i);
    }
    std::vector<std::size_t> present;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (by_class[c].empty()) continue;
      if (by_class[c].size() < 2) {
        fail(Errc::ClassTooSmall, kModule,
             std::string("class ") + std::string(to_string(kAllLabels[c])) +
                 " has fewer than 2 samples");
      }
      present.push_back(c);
    }

    // Largest-remainder apportionment of the overall train count across
    // classes, so totals are exact and per-class ratios are off by at most
    // one sample.
    const std::size_t want_train = std::clamp<std::size_t>(
        static_cast<std::size_t>(
            std::llround(train_frac * static_cast<double>(d.size()))),
        1, d.size() - 1);
    std::vector<std::size_t> quota(present.size());
    std::vector<double> remainder(present.size());
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < present.size(); ++k) {
      const std::size_t n_c = by_class[present[k]].size();
      const double exact = train_frac * static_cast<double>(n_c);
      quota[k] = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::floor(exact)), 1, n_c - 1);
      remainder[k] = exact - std::floor(exact);
      assigned += quota[k];
    }
    std::vector<std::size_t> order(present.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
      return a < b;
    });
    while (assigned < want_train) {
      bool moved = false;
      for (std::size_t k : order) {
        if (quota[k] < by_class[present[k]].size() - 1) {
          ++quota[k];
          ++assigned;
          moved = true;
          if (assigned == want_train) break;
        }
      }
      if (!moved) break;
    }
    while (assigned > want_train) {
      bool moved = false;
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (quota[*it] > 1) {
          --quota[*it];
          --assigned;
          moved = true;
          if (assigned == want_train) break;
        }
      }
      if (!moved) break;
    }

    for (std::size_t k = 0; k < present.size(); ++k) {
      auto& idx = by_class[present[k]];
      rng.shuffle(idx);
      train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + quota[k]);
      test_idx.insert(test_idx.end(), idx.begin() + quota[k], idx.end());
    }
  } else {
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_frac * static_cast<double>(idx.size())));
    const std::size_t clamped = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    train_idx.assign(idx.begin(), idx.begin() + clamped);
    test_idx.assign(idx.begin() + clamped, idx.end());
  }

  // keep row order stable so repeated runs serialize identically
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {d.subset(train_idx), d.subset(test_idx)};
}

Dataset rebalance_classes(const Dataset& d, std::size_t total, std::uint64_t seed) {
  if (!d.fully_labeled() || d.empty()) {
    fail(Errc::InvalidArgument, kModule, "rebalance requires a labeled dataset");
  }
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < d.size(); ++i) {
    by_class[static_cast<std::size_t>(*d.labels[i])].push_back(i);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (by_class[c].empty()) {
      fail(Errc::ClassTooSmall, kModule,
           std::string("class ") + std::string(to_string(kAllLabels[c])) +
               " absent, cannot rebalance");
    }
  }

  // per-class quota: total split as evenly as three ways allows
  std::array<std::size_t, kNumClasses> quota{};
  const std::size_t base = total / kNumClasses;
  std::size_t remainder = total % kNumClasses;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    quota[c] = base + (remainder > 0 ? 1 : 0);
    if (remainder > 0) --remainder;
  }

  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(total);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& idx = by_class[c];
    if (idx.size() >= quota[c]) {
      rng.shuffle(idx);
      chosen.insert(chosen.end(), idx.begin(), idx.begin() + quota[c]);
    } else {
      chosen.insert(chosen.end(), idx.begin(), idx.end());
      for (std::size_t k = idx.size(); k < quota[c]; ++k) {
        chosen.push_back(idx[rng.index(idx.size())]);
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return d.subset(chosen);
}

}  // namespace v2m
