#include <doctest.h>

#include <cmath>
#include <set>

#include "v2m/csv.hpp"
#include "v2m/dataset.hpp"
#include "v2m/errors.hpp"
#include "test_util.hpp"

using namespace v2m;

namespace {

bool same_observations(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.observations[i].features() != b.observations[i].features()) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("generate_scenario is deterministic and respects invariants") {
  const Dataset a = generate_scenario(2000, 7);
  const Dataset b = generate_scenario(2000, 7);
  REQUIRE(a.size() == 2000);
  CHECK(same_observations(a, b));
  for (const auto& obs : a.observations) obs.validate();
  for (Provenance p : a.provenance) CHECK(p == Provenance::Real);

  const Dataset single = generate_scenario(1, 0);
  REQUIRE(single.size() == 1);
  single.observations[0].validate();
}

TEST_CASE("generate_scenario sample means stay inside profile-declared ranges") {
  const ScenarioProfile profile;
  const Dataset d = generate_scenario(2000, 7, profile);

  double consumption = 0, pv = 0, wind = 0, capacity = 0, soc = 0, hour = 0;
  for (const auto& obs : d.observations) {
    consumption += obs.consumption_kw;
    pv += obs.pv_generation_kw;
    wind += obs.wind_generation_kw;
    capacity += obs.battery_capacity_kwh;
    soc += obs.battery_soc_frac;
    hour += obs.hour_of_day;
  }
  const double n = static_cast<double>(d.size());
  consumption /= n;
  pv /= n;
  wind /= n;
  capacity /= n;
  soc /= n;
  hour /= n;

  // bounds follow from the profile arithmetic
  CHECK(consumption >= profile.base_consumption_kw);
  CHECK(consumption <= profile.base_consumption_kw + profile.consumption_peak_kw);
  CHECK(pv > 0.0);
  CHECK(pv <= profile.pv_capacity_kw);
  CHECK(wind >= profile.wind_mean_kw - profile.wind_gust_kw);
  CHECK(wind <= profile.wind_mean_kw + profile.wind_gust_kw);
  CHECK(capacity >= profile.battery_capacity_min_kwh);
  CHECK(capacity <= profile.battery_capacity_max_kwh);
  CHECK(soc > 0.4);
  CHECK(soc < 0.6);
  CHECK(hour > 10.0);
  CHECK(hour < 13.0);
}

TEST_CASE("generate_scenario rejects bad profiles") {
  ScenarioProfile negative;
  negative.wind_mean_kw = -1.0;
  CHECK_THROWS_WITH_AS(generate_scenario(10, 0, negative), doctest::Contains("profile"),
                       Error);

  ScenarioProfile inverted;
  inverted.battery_capacity_min_kwh = 50.0;
  inverted.battery_capacity_max_kwh = 10.0;
  try {
    generate_scenario(10, 0, inverted);
    FAIL("expected InvalidProfile");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidProfile);
  }
}

TEST_CASE("load_csv round-trips a generated fixture") {
  const auto dir = test::scratch_dir("csv");
  const Dataset d = generate_scenario(2000, 11);
  save_dataset_csv(d, dir / "fixture.csv");

  const Dataset loaded = load_csv(dir / "fixture.csv");
  REQUIRE(loaded.size() == 2000);
  CHECK(same_observations(d, loaded));
  for (Provenance p : loaded.provenance) CHECK(p == Provenance::Real);
  for (const auto& l : loaded.labels) CHECK_FALSE(l.has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("load_csv errors: header only, parse failure, missing column") {
  const auto dir = test::scratch_dir("csv_err");

  write_text_file(dir / "empty.csv",
                  "consumption_kw,pv_generation_kw,wind_generation_kw,"
                  "battery_capacity_kwh,battery_soc_frac,hour_of_day\n");
  try {
    load_csv(dir / "empty.csv");
    FAIL("expected EmptyFile");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyFile);
  }

  std::string bad =
      "consumption_kw,pv_generation_kw,wind_generation_kw,battery_capacity_kwh,"
      "battery_soc_frac,hour_of_day\n";
  for (int i = 0; i < 4; ++i) bad += "1,1,1,1,0.5,3\n";
  bad += "abc,1,1,1,0.5,3\n";
  write_text_file(dir / "bad.csv", bad);
  try {
    load_csv(dir / "bad.csv");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("row 5") != std::string::npos);
    CHECK(std::string(e.what()).find("consumption_kw") != std::string::npos);
  }

  write_text_file(dir / "missing.csv", "a,b\n1,2\n");
  try {
    load_csv(dir / "missing.csv");
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingColumn);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("labeled dataset CSV keeps labels and provenance") {
  const auto dir = test::scratch_dir("csv_labeled");
  Dataset d = test::labeled_benchmark(200, 5);
  d.provenance[3] = Provenance::Generated;
  save_dataset_csv(d, dir / "labeled.csv");
  const Dataset loaded = load_dataset_csv(dir / "labeled.csv");
  REQUIRE(loaded.size() == d.size());
  CHECK(same_observations(d, loaded));
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(loaded.labels[i] == d.labels[i]);
    CHECK(loaded.provenance[i] == d.provenance[i]);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("fit_normalizer: analytic two-point case and zero variance") {
  Dataset two;
  two.push_back(test::obs_at(0.0, 1.0, 2.0, 3.0, 0.25, 5));
  two.push_back(test::obs_at(2.0, 3.0, 4.0, 5.0, 0.75, 7));
  const Normalizer norm = fit_normalizer(two);
  CHECK(norm.mean[0] == doctest::Approx(1.0));
  CHECK(norm.stddev[0] == doctest::Approx(1.0));  // population convention

  Dataset constant;
  constant.push_back(test::obs_at(1.0, 1.0, 1.0, 1.0, 0.5, 3));
  constant.push_back(test::obs_at(2.0, 1.0, 2.0, 2.0, 0.6, 4));
  try {
    fit_normalizer(constant);
    FAIL("expected ZeroVarianceFeature");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroVarianceFeature);
  }
}

TEST_CASE("standardized columns have zero mean and unit variance") {
  Dataset d = generate_scenario(2000, 13);
  d.norm = fit_normalizer(d);
  const Matrix x = d.standardized_matrix();
  for (std::size_t j = 0; j < x.cols; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) mean += x(i, j);
    mean /= static_cast<double>(x.rows);
    double var = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      var += (x(i, j) - mean) * (x(i, j) - mean);
    }
    var /= static_cast<double>(x.rows);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
  }
}

TEST_CASE("standardize then destandardize is the identity") {
  Dataset d = generate_scenario(500, 17);
  d.norm = fit_normalizer(d);
  for (std::size_t i = 0; i < d.size(); i += 37) {
    const auto raw = d.observations[i].features();
    const auto back = d.norm->destandardize(d.norm->standardize(raw));
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      const double scale = std::max(1.0, std::abs(raw[j]));
      CHECK(std::abs(back[j] - raw[j]) / scale < 1e-9);
    }
  }
}

TEST_CASE("split: exact 80/20 partition on the 2000-row benchmark") {
  const Dataset d = test::labeled_benchmark(2000, 3);
  const auto [train, test_part] = split(d, 0.8, 99, true);
  CHECK(train.size() == 1600);
  CHECK(test_part.size() == 400);

  // per-class proportions preserved within one sample
  const auto full = d.class_counts();
  const auto tr = train.class_counts();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double expected = 0.8 * static_cast<double>(full[c]);
    CHECK(std::abs(static_cast<double>(tr[c]) - expected) <= 1.0);
  }
}

TEST_CASE("split: partition is disjoint and covers the dataset") {
  const Dataset d = test::labeled_benchmark(300, 23);
  const auto [train, test_part] = split(d, 0.7, 5, true);
  CHECK(train.size() + test_part.size() == d.size());

  std::multiset<std::array<double, kFeatureDim>> all, both;
  for (const auto& obs : d.observations) all.insert(obs.features());
  for (const auto& obs : train.observations) both.insert(obs.features());
  for (const auto& obs : test_part.observations) both.insert(obs.features());
  CHECK(all == both);
}

TEST_CASE("split: two samples of one class at 0.5 give 1/1") {
  Dataset d;
  d.push_back(test::obs_at(1.0), PriorityLabel::High);
  d.push_back(test::obs_at(2.0), PriorityLabel::High);
  d.norm = test::identity_normalizer();
  const auto [train, test_part] = split(d, 0.5, 0, true);
  CHECK(train.size() == 1);
  CHECK(test_part.size() == 1);
}

TEST_CASE("split: deterministic per seed") {
  const Dataset d = test::labeled_benchmark(400, 29);
  const auto [a_train, a_test] = split(d, 0.8, 77, true);
  const auto [b_train, b_test] = split(d, 0.8, 77, true);
  CHECK(same_observations(a_train, b_train));
  CHECK(same_observations(a_test, b_test));
}

TEST_CASE("split: class with one sample fails under stratification") {
  Dataset d;
  d.push_back(test::obs_at(1.0), PriorityLabel::High);
  d.push_back(test::obs_at(2.0), PriorityLabel::High);
  d.push_back(test::obs_at(9.0), PriorityLabel::Low);
  d.norm = test::identity_normalizer();
  try {
    split(d, 0.5, 0, true);
    FAIL("expected ClassTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ClassTooSmall);
  }
}

TEST_CASE("rebalance_classes yields near-equal classes at the exact total") {
  Dataset d = generate_scenario(2000, 31);
  d.norm = fit_normalizer(d);
  const KMeansModel kmeans = kmeans_fit(d, 3, 4, 31);
  const Dataset labeled = label_dataset(d, kmeans);
  const Dataset balanced = rebalance_classes(labeled, 2000, 31);
  CHECK(balanced.size() == 2000);
  const auto counts = balanced.class_counts();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    CHECK(counts[c] >= 666);
    CHECK(counts[c] <= 667);
  }
}

}  // TEST_SUITE
