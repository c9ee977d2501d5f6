#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "v2m/adversary.hpp"
#include "v2m/errors.hpp"
#include "test_util.hpp"

using namespace v2m;

namespace {

/// Deterministic stand-in surrogate for geometric crafting tests: Low iff the
/// first feature is at or past the threshold.
class ThresholdSurrogate final : public TrainedClassifier {
 public:
  explicit ThresholdSurrogate(double threshold) : threshold_(threshold) {}
  ModelKind kind() const noexcept override { return ModelKind::DecisionTree; }
  std::size_t feature_dim() const noexcept override { return kFeatureDim; }

 private:
  PriorityLabel do_predict(std::span<const double> x) const override {
    return x[0] >= threshold_ ? PriorityLabel::Low : PriorityLabel::High;
  }
  double threshold_;
};

Matrix single_prototype(double x0) {
  Matrix m(1, kFeatureDim);
  m(0, 0) = x0;
  return m;
}

std::multiset<std::array<double, kFeatureDim>> feature_multiset(const Dataset& d) {
  std::multiset<std::array<double, kFeatureDim>> out;
  for (const auto& obs : d.observations) out.insert(obs.features());
  return out;
}

}  // namespace

TEST_SUITE("adversary") {

TEST_CASE("collect: full fraction returns the whole set in order") {
  const Dataset d = test::labeled_benchmark(300, 301);
  const Dataset c = collect(d, 1.0, 5);
  REQUIRE(c.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(c.observations[i].features() == d.observations[i].features());
  }
}

TEST_CASE("collect: 80% of 2000 is exactly 1600, stratified") {
  const Dataset d = test::labeled_benchmark(2000, 303);
  const Dataset c = collect(d, 0.8, 7);
  CHECK(c.size() == 1600);

  const auto full = d.class_counts();
  const auto got = c.class_counts();
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    CHECK(std::abs(static_cast<double>(got[k]) -
                   0.8 * static_cast<double>(full[k])) <= 1.0);
  }
  for (Provenance p : c.provenance) CHECK(p == Provenance::Real);
}

TEST_CASE("collect: different seeds give different same-sized subsets") {
  const Dataset d = test::labeled_benchmark(500, 307);
  const Dataset a = collect(d, 0.6, 1);
  const Dataset b = collect(d, 0.6, 2);
  CHECK(a.size() == b.size());
  CHECK(a.class_counts() == b.class_counts());
  CHECK(feature_multiset(a) != feature_multiset(b));
}

TEST_CASE("collect rejects fractions off the case grid") {
  const Dataset d = test::labeled_benchmark(100, 311);
  CHECK_THROWS_AS(collect(d, 0.5, 0), Error);
}

TEST_CASE("augment: equal target skips augmentation") {
  const Dataset d = test::labeled_benchmark(200, 313);
  const auto [combined, model] = augment(d, d.size(), test::tiny_cgan_config(1));
  CHECK(combined.augmentation_skipped);
  CHECK(combined.real_count == d.size());
  CHECK(combined.generated_count == 0);
  CHECK_FALSE(model.has_value());
}

TEST_CASE("augment: tops the dataset up to the target with generated rows") {
  const Dataset d = test::labeled_benchmark(500, 317);
  const Dataset c = collect(d, 0.4, 11);  // 200 rows
  REQUIRE(c.size() == 200);

  const auto [combined, model] = augment(c, 500, test::tiny_cgan_config(2, 10));
  CHECK(combined.real_count == 200);
  CHECK(combined.generated_count == 300);
  CHECK(combined.dataset.size() == 500);
  CHECK_FALSE(combined.augmentation_skipped);
  CHECK(model.has_value());

  std::size_t generated_seen = 0;
  for (std::size_t i = 0; i < combined.dataset.size(); ++i) {
    if (combined.dataset.provenance[i] == Provenance::Generated) {
      ++generated_seen;
      combined.dataset.observations[i].validate();  // clipping contract
    }
  }
  CHECK(generated_seen == 300);

  // generated class counts proportional to the collected class counts
  const auto collected_counts = c.class_counts();
  const auto combined_counts = combined.dataset.class_counts();
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const double expected = static_cast<double>(collected_counts[k]) * 500.0 / 200.0;
    CHECK(std::abs(static_cast<double>(combined_counts[k]) - expected) <= 1.0);
  }
}

TEST_CASE("select_surrogate: case-E shape uses every real row as test data") {
  // 400 real + 1600 generated rows
  const Dataset d = test::labeled_benchmark(2000, 331);
  Dataset combined_data;
  combined_data.norm = d.norm;
  for (std::size_t i = 0; i < d.size(); ++i) {
    combined_data.push_back(d.observations[i], d.labels[i],
                            i < 400 ? Provenance::Real : Provenance::Generated);
  }
  CombinedDataset combined;
  combined.dataset = std::move(combined_data);
  combined.real_count = 400;
  combined.generated_count = 1600;

  const SurrogateSelection selection = select_surrogate(combined, {}, 3);
  CHECK(selection.test_size == 400);
  CHECK(selection.test_real_count == 400);
  CHECK(selection.train_size == 1600);
  CHECK(selection.train_generated_count == 1600);
}

TEST_CASE("select_surrogate: all-real reduces to a plain 80/20 split") {
  const Dataset d = test::labeled_benchmark(500, 337);
  CombinedDataset combined;
  combined.dataset = d;
  combined.real_count = d.size();
  const SurrogateSelection selection = select_surrogate(combined, {}, 4);
  CHECK(selection.test_size == 100);
  CHECK(selection.train_size == 400);
  CHECK(selection.train_generated_count == 0);
}

TEST_CASE("select_surrogate: reports for all six kinds, lexicographic winner") {
  const Dataset d = test::labeled_benchmark(400, 347);
  CombinedDataset combined;
  combined.dataset = d;
  combined.real_count = d.size();
  const SurrogateSelection selection = select_surrogate(combined, {}, 5);

  for (ModelKind kind : kAllModelKinds) {
    CHECK(selection.reports[static_cast<std::size_t>(kind)].total > 0);
  }
  // recompute the argmax with the preference-order tie rule
  ModelKind expected = kSurrogatePreference[0];
  for (ModelKind kind : kSurrogatePreference) {
    const auto& a = selection.reports[static_cast<std::size_t>(kind)];
    const auto& b = selection.reports[static_cast<std::size_t>(expected)];
    if (metrics_better(a, b)) expected = kind;
  }
  CHECK(selection.chosen == expected);
  CHECK(selection.chosen_model != nullptr);
  CHECK(selection.chosen_model->kind() == selection.chosen);
}

TEST_CASE("select_surrogate: too few real rows fails") {
  const Dataset d = test::labeled_benchmark(500, 349);
  CombinedDataset combined;
  combined.dataset = d;
  for (std::size_t i = 0; i < d.size(); ++i) {
    combined.dataset.provenance[i] = i < 60 ? Provenance::Real : Provenance::Generated;
  }
  combined.real_count = 60;
  combined.generated_count = 440;
  try {
    select_surrogate(combined, {}, 6);
    FAIL("expected InsufficientRealData");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientRealData);
  }
}

TEST_CASE("craft_evasion: already-Low input returns unchanged at zero steps") {
  const ThresholdSurrogate surrogate(0.0);
  std::vector<double> x(kFeatureDim, 0.0);
  x[0] = 1.0;  // classified Low already
  const CraftResult r =
      craft_evasion(x, surrogate, single_prototype(5.0), EvasionAttackConfig{});
  CHECK(r.flipped);
  CHECK(r.steps_used == 0);
  CHECK(r.features == x);
}

TEST_CASE("craft_evasion: one geometric step across a linear boundary") {
  // victim at x0 = 0, prototype centroid at x0 = 1, boundary at x0 = 0.04,
  // step size 0.05: the first step crosses the boundary
  const ThresholdSurrogate surrogate(0.04);
  EvasionAttackConfig config;
  config.step_size = 0.05;
  std::vector<double> x(kFeatureDim, 0.0);
  const CraftResult r = craft_evasion(x, surrogate, single_prototype(1.0), config);
  CHECK(r.flipped);
  CHECK(r.steps_used == 1);
  CHECK(r.features[0] == doctest::Approx(0.05));
}

TEST_CASE("craft_evasion: minimality and monotone approach on a real surrogate") {
  const Dataset d = test::labeled_benchmark(400, 353);
  const auto surrogate = fit_classifier(ModelKind::KNearestNeighbors, d);

  std::vector<std::size_t> low_rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (*d.labels[i] == PriorityLabel::Low) low_rows.push_back(i);
  }
  Matrix prototypes(low_rows.size(), kFeatureDim);
  for (std::size_t r = 0; r < low_rows.size(); ++r) {
    const auto row = d.standardized_row(low_rows[r]);
    std::copy(row.begin(), row.end(), prototypes.row(r).begin());
  }

  EvasionAttackConfig config;
  std::size_t crafted_with_steps = 0;
  for (std::size_t i = 0; i < d.size() && crafted_with_steps < 25; ++i) {
    if (*d.labels[i] == PriorityLabel::Low) continue;
    const auto x = d.standardized_row(i);
    const CraftResult r = craft_evasion(x, *surrogate, prototypes, config);
    if (!r.flipped || r.steps_used == 0) continue;
    ++crafted_with_steps;

    // rebuild the fixed centroid the crafting used
    const std::size_t k = std::min<std::size_t>(config.neighbor_count, prototypes.rows);
    std::vector<std::pair<double, std::size_t>> dist(prototypes.rows);
    for (std::size_t p = 0; p < prototypes.rows; ++p) {
      double s = 0.0;
      for (std::size_t j = 0; j < kFeatureDim; ++j) {
        const double diff = prototypes(p, j) - x[j];
        s += diff * diff;
      }
      dist[p] = {s, p};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::vector<double> centroid(kFeatureDim, 0.0);
    for (std::size_t n = 0; n < k; ++n) {
      for (std::size_t j = 0; j < kFeatureDim; ++j) {
        centroid[j] += prototypes(dist[n].second, j);
      }
    }
    for (double& v : centroid) v /= static_cast<double>(k);

    // walk the same ray and check minimality plus strict monotone approach
    auto at_step = [&](std::size_t t) {
      double total = 0.0;
      for (std::size_t j = 0; j < kFeatureDim; ++j) {
        const double diff = centroid[j] - x[j];
        total += diff * diff;
      }
      total = std::sqrt(total);
      const double travelled = std::min(static_cast<double>(t) * config.step_size, total);
      std::vector<double> point(kFeatureDim);
      for (std::size_t j = 0; j < kFeatureDim; ++j) {
        point[j] = x[j] + (total > 0 ? travelled / total : 0.0) * (centroid[j] - x[j]);
      }
      return point;
    };

    const auto final_point = at_step(r.steps_used);
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      CHECK(r.features[j] == doctest::Approx(final_point[j]).epsilon(1e-12));
    }
    if (r.steps_used > 1) {
      CHECK(surrogate->predict(at_step(r.steps_used - 1)) != PriorityLabel::Low);
    }
    double prev_dist = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t <= r.steps_used; ++t) {
      const auto point = at_step(t);
      double dist_c = 0.0;
      for (std::size_t j = 0; j < kFeatureDim; ++j) {
        const double diff = centroid[j] - point[j];
        dist_c += diff * diff;
      }
      dist_c = std::sqrt(dist_c);
      if (t > 0) CHECK(dist_c < prev_dist);
      prev_dist = dist_c;
    }
  }
  CHECK(crafted_with_steps > 0);
}

TEST_CASE("white-box crafting flips at least 90% within 100 steps") {
  const Dataset d = test::labeled_benchmark(2000, 911);
  const auto surrogate = fit_classifier(ModelKind::KNearestNeighbors, d);

  std::vector<std::size_t> low_rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (*d.labels[i] == PriorityLabel::Low) low_rows.push_back(i);
  }
  Matrix prototypes(low_rows.size(), kFeatureDim);
  for (std::size_t r = 0; r < low_rows.size(); ++r) {
    const auto row = d.standardized_row(low_rows[r]);
    std::copy(row.begin(), row.end(), prototypes.row(r).begin());
  }

  const Dataset victims = test::labeled_benchmark(200, 917);
  EvasionAttackConfig config;
  config.max_steps = 100;
  std::size_t attacked = 0, flipped = 0;
  for (std::size_t i = 0; i < victims.size(); ++i) {
    if (*victims.labels[i] == PriorityLabel::Low) continue;
    ++attacked;
    const CraftResult r =
        craft_evasion(victims.standardized_row(i), *surrogate, prototypes, config);
    if (r.flipped) ++flipped;
  }
  REQUIRE(attacked > 0);
  CHECK(static_cast<double>(flipped) / static_cast<double>(attacked) >= 0.9);
}

TEST_CASE("craft_evasion without prototypes fails") {
  const ThresholdSurrogate surrogate(10.0);
  std::vector<double> x(kFeatureDim, 0.0);
  Matrix empty(0, kFeatureDim);
  try {
    craft_evasion(x, surrogate, empty, EvasionAttackConfig{});
    FAIL("expected NoLowPrototypes");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoLowPrototypes);
  }
}

TEST_CASE("run_attack case A: no generated rows, combined equals the training set") {
  const Dataset edge_train = test::labeled_benchmark(400, 359);
  const Dataset victims = test::labeled_benchmark(60, 361);
  const auto edge = fit_classifier(ModelKind::KNearestNeighbors, edge_train);

  const CaseConfig case_cfg = CaseConfig::for_case(CaseId::A, true, 1);
  const AttackOutcome outcome =
      run_attack(*edge, edge_train, victims, case_cfg, EvasionAttackConfig{},
                 test::tiny_cgan_config(3, 5));

  CHECK(outcome.combined.generated_count == 0);
  CHECK(outcome.combined.real_count == edge_train.size());
  CHECK(feature_multiset(outcome.combined.dataset) == feature_multiset(edge_train));
  CHECK_FALSE(outcome.cgan.has_value());
}

TEST_CASE("run_attack without CGAN keeps only the collected rows") {
  const Dataset edge_train = test::labeled_benchmark(500, 367);
  const Dataset victims = test::labeled_benchmark(60, 373);
  const auto edge = fit_classifier(ModelKind::KNearestNeighbors, edge_train);

  const CaseConfig case_cfg = CaseConfig::for_case(CaseId::C, false, 2);
  const AttackOutcome outcome =
      run_attack(*edge, edge_train, victims, case_cfg, EvasionAttackConfig{},
                 test::tiny_cgan_config(4, 5));

  CHECK(outcome.combined.real_count == 300);  // 60% of 500
  CHECK(outcome.combined.generated_count == 0);
  CHECK(outcome.combined.dataset.size() == 300);
  CHECK_FALSE(outcome.cgan.has_value());
}

TEST_CASE("run_attack preserves true labels and passes Low victims through") {
  const Dataset edge_train = test::labeled_benchmark(400, 379);
  const Dataset victims = test::labeled_benchmark(90, 383);
  const auto edge = fit_classifier(ModelKind::KNearestNeighbors, edge_train);

  const CaseConfig case_cfg = CaseConfig::for_case(CaseId::B, true, 3);
  const AttackOutcome outcome =
      run_attack(*edge, edge_train, victims, case_cfg, EvasionAttackConfig{},
                 test::tiny_cgan_config(5, 5));

  REQUIRE(outcome.victims.size() == victims.size());
  for (std::size_t i = 0; i < victims.size(); ++i) {
    const auto& v = outcome.victims[i];
    CHECK(v.true_label == *victims.labels[i]);  // ground truth preserved
    if (v.true_label == PriorityLabel::Low) {
      CHECK_FALSE(v.attacked);
      CHECK(v.perturbed == v.original);
    } else {
      CHECK(v.attacked);
    }
  }
}

TEST_CASE("run_attack is deterministic per case seed") {
  const Dataset edge_train = test::labeled_benchmark(300, 389);
  const Dataset victims = test::labeled_benchmark(45, 397);
  const auto edge = fit_classifier(ModelKind::KNearestNeighbors, edge_train);

  const CaseConfig case_cfg = CaseConfig::for_case(CaseId::D, true, 77);
  const auto run = [&]() {
    return run_attack(*edge, edge_train, victims, case_cfg, EvasionAttackConfig{},
                      test::tiny_cgan_config(6, 5));
  };
  const AttackOutcome a = run();
  const AttackOutcome b = run();
  REQUIRE(a.victims.size() == b.victims.size());
  for (std::size_t i = 0; i < a.victims.size(); ++i) {
    CHECK(a.victims[i].perturbed == b.victims[i].perturbed);
    CHECK(a.victims[i].steps_used == b.victims[i].steps_used);
  }
  CHECK(a.selection.chosen == b.selection.chosen);
}

TEST_CASE("victims never overlap the training rows") {
  const Dataset edge_train = test::labeled_benchmark(300, 401);
  const Dataset victims = test::labeled_benchmark(45, 409);
  const auto train_rows = feature_multiset(edge_train);
  for (const auto& obs : victims.observations) {
    CHECK(train_rows.count(obs.features()) == 0);
  }
}

TEST_CASE("case configs validate the fraction table") {
  CHECK(case_fraction(CaseId::A) == 1.0);
  CHECK(case_fraction(CaseId::B) == 0.8);
  CHECK(case_fraction(CaseId::C) == 0.6);
  CHECK(case_fraction(CaseId::D) == 0.4);
  CHECK(case_fraction(CaseId::E) == 0.2);

  CaseConfig bad = CaseConfig::for_case(CaseId::B, true, 0);
  bad.collected_fraction = 0.6;
  CHECK_THROWS_AS(bad.validate(), Error);
}

}  // TEST_SUITE
