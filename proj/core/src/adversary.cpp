#include "v2m/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "v2m/errors.hpp"
#include "v2m/rng.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "adversary";

constexpr std::array<double, 5> kCaseFractions = {1.0, 0.8, 0.6, 0.4, 0.2};

bool allowed_fraction(double fraction) {
  for (double f : kCaseFractions) {
    if (fraction == f) return true;
  }
  return false;
}

/// Largest-remainder apportionment of `total` across weights.
std::array<std::size_t, kNumClasses> apportion(
    const std::array<std::size_t, kNumClasses>& weights, std::size_t total) {
  const std::size_t weight_sum =
      std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  std::array<std::size_t, kNumClasses> out{};
  if (weight_sum == 0 || total == 0) return out;

  std::array<double, kNumClasses> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double exact = static_cast<double>(total) *
                         static_cast<double>(weights[c]) /
                         static_cast<double>(weight_sum);
    out[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    assigned += out[c];
  }
  std::array<std::size_t, kNumClasses> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a < b;
  });
  for (std::size_t k = 0; assigned < total; ++k) {
    out[order[k % kNumClasses]]++;
    ++assigned;
  }
  return out;
}

}  // namespace

std::string_view to_string(CaseId id) {
  switch (id) {
    case CaseId::A: return "A";
    case CaseId::B: return "B";
    case CaseId::C: return "C";
    case CaseId::D: return "D";
    case CaseId::E: return "E";
  }
  return "?";
}

std::optional<CaseId> case_from_string(std::string_view s) {
  for (CaseId id : kAllCases) {
    if (to_string(id) == s) return id;
  }
  return std::nullopt;
}

double case_fraction(CaseId id) {
  return kCaseFractions[static_cast<std::size_t>(id)];
}

void CaseConfig::validate() const {
  if (!allowed_fraction(collected_fraction)) {
    fail(Errc::InvalidArgument, kModule,
         "collected_fraction must be one of 1.0, 0.8, 0.6, 0.4, 0.2");
  }
  if (collected_fraction != case_fraction(case_id)) {
    fail(Errc::InvalidArgument, kModule,
         "collected_fraction does not match the case id");
  }
}

void EvasionAttackConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    fail(Errc::InvalidArgument, kModule, "step_size must be positive");
  }
  if (max_steps < 1) {
    fail(Errc::InvalidArgument, kModule, "max_steps must be >= 1");
  }
  if (neighbor_count < 1) {
    fail(Errc::InvalidArgument, kModule, "neighbor_count must be >= 1");
  }
}

Dataset collect(const Dataset& edge_train, double fraction, std::uint64_t seed) {
  if (!allowed_fraction(fraction)) {
    fail(Errc::InvalidArgument, kModule,
         "fraction must be one of 1.0, 0.8, 0.6, 0.4, 0.2");
  }
  if (!edge_train.fully_labeled() || edge_train.empty()) {
    fail(Errc::InvalidArgument, kModule, "edge training data must be labeled");
  }
  if (fraction == 1.0) {
    return edge_train;  // white-box: the whole set, order preserved
  }

  const std::size_t want = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(edge_train.size())));
  const auto counts = edge_train.class_counts();
  const auto quota = apportion(counts, want);

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < edge_train.size(); ++i) {
    by_class[static_cast<std::size_t>(*edge_train.labels[i])].push_back(i);
  }
  Rng rng(derive_seed(seed, "adversary/collect"));
  std::vector<std::size_t> chosen;
  chosen.reserve(want);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& idx = by_class[c];
    if (quota[c] > idx.size()) {
      fail(Errc::InvalidArgument, kModule, "class quota exceeds class size");
    }
    rng.shuffle(idx);
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + quota[c]);
  }
  std::sort(chosen.begin(), chosen.end());
  return edge_train.subset(chosen);
}

std::pair<CombinedDataset, std::optional<CganModel>> augment(
    const Dataset& collected, std::size_t target_total, const CganConfig& config) {
  if (collected.empty() || !collected.fully_labeled()) {
    fail(Errc::InvalidArgument, kModule, "collected data must be labeled");
  }
  if (target_total < collected.size()) {
    fail(Errc::InvalidArgument, kModule, "target_total below collected size");
  }

  CombinedDataset combined;
  combined.dataset = collected;
  combined.real_count = collected.size();

  if (target_total == collected.size()) {
    combined.augmentation_skipped = true;
    return {std::move(combined), std::nullopt};
  }

  CganModel model = cgan_init(config, kFeatureDim);
  cgan_train(model, collected);

  const std::size_t missing = target_total - collected.size();
  const auto quota = apportion(collected.class_counts(), missing);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (quota[c] == 0) continue;
    Rng rng(derive_seed(config.seed,
                        "cgan/sample/" + std::string(to_string(kAllLabels[c]))));
    Dataset generated = cgan_sample(model, kAllLabels[c], quota[c], rng);
    for (std::size_t i = 0; i < generated.size(); ++i) {
      combined.dataset.push_back(generated.observations[i], generated.labels[i],
                                 Provenance::Generated);
    }
    combined.generated_count += generated.size();
  }
  return {std::move(combined), std::move(model)};
}

SurrogateSelection select_surrogate(const CombinedDataset& combined,
                                    const Hyperparams& hp, std::uint64_t seed) {
  const Dataset& data = combined.dataset;
  if (data.empty() || !data.fully_labeled()) {
    fail(Errc::InvalidArgument, kModule, "combined dataset must be labeled");
  }
  const std::size_t total = data.size();
  const std::size_t test_size = total / 5;  // 20% of the combined total

  // the test split is drawn exclusively from Real-provenance rows
  std::array<std::vector<std::size_t>, kNumClasses> real_by_class;
  std::size_t real_count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.provenance[i] == Provenance::Real) {
      real_by_class[static_cast<std::size_t>(*data.labels[i])].push_back(i);
      ++real_count;
    }
  }
  if (real_count < test_size) {
    fail(Errc::InsufficientRealData, kModule,
         "fewer real rows than the 20% test split needs");
  }

  std::array<std::size_t, kNumClasses> real_counts{};
  for (std::size_t c = 0; c < kNumClasses; ++c) real_counts[c] = real_by_class[c].size();
  const auto quota = apportion(real_counts, test_size);

  Rng rng(derive_seed(seed, "adversary/surrogate-split"));
  std::vector<bool> in_test(total, false);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& idx = real_by_class[c];
    if (quota[c] > idx.size()) {
      fail(Errc::InsufficientRealData, kModule,
           "a class lacks real rows for the stratified test split");
    }
    rng.shuffle(idx);
    for (std::size_t k = 0; k < quota[c]; ++k) in_test[idx[k]] = true;
  }

  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < total; ++i) {
    (in_test[i] ? test_idx : train_idx).push_back(i);
  }
  const Dataset train = data.subset(train_idx);
  const Dataset test = data.subset(test_idx);

  SurrogateSelection selection;
  selection.train_size = train.size();
  selection.test_size = test.size();
  selection.test_real_count = test.size();  // drawn from Real rows only
  for (Provenance p : train.provenance) {
    if (p == Provenance::Generated) selection.train_generated_count++;
  }
  std::vector<std::unique_ptr<TrainedClassifier>> fitted(kAllModelKinds.size());
  for (ModelKind kind : kAllModelKinds) {
    const auto k = static_cast<std::size_t>(kind);
    fitted[k] = fit_classifier(kind, train, hp,
                               derive_seed(seed, "adversary/surrogate-fit/" +
                                                     std::string(to_string(kind))));
    selection.reports[k] = evaluate(*fitted[k], test);
  }

  // lexicographic (accuracy, F1) argmax; exact ties follow the fixed
  // preference order
  bool have_choice = false;
  for (ModelKind kind : kSurrogatePreference) {
    const auto k = static_cast<std::size_t>(kind);
    const auto chosen_k = static_cast<std::size_t>(selection.chosen);
    if (!have_choice || metrics_better(selection.reports[k],
                                       selection.reports[chosen_k])) {
      selection.chosen = kind;
      have_choice = true;
    }
  }
  selection.chosen_model = std::move(fitted[static_cast<std::size_t>(selection.chosen)]);
  return selection;
}

CraftResult craft_evasion(std::span<const double> x_std,
                          const TrainedClassifier& surrogate,
                          const Matrix& low_prototypes,
                          const EvasionAttackConfig& config) {
  config.validate();
  if (low_prototypes.rows == 0) {
    fail(Errc::NoLowPrototypes, kModule, "no low-priority prototypes available");
  }

  CraftResult result;
  result.features.assign(x_std.begin(), x_std.end());
  if (surrogate.predict(result.features) == PriorityLabel::Low) {
    result.flipped = true;  // zero steps, unchanged
    return result;
  }

  // fixed target: centroid of the neighbor_count nearest Low prototypes
  const std::size_t k = std::min<std::size_t>(config.neighbor_count, low_prototypes.rows);
  std::vector<std::pair<double, std::size_t>> dist(low_prototypes.rows);
  for (std::size_t i = 0; i < low_prototypes.rows; ++i) {
    double s = 0.0;
    const auto row = low_prototypes.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double diff = row[j] - x_std[j];
      s += diff * diff;
    }
    dist[i] = {s, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<double> centroid(x_std.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto row = low_prototypes.row(dist[i].second);
    for (std::size_t j = 0; j < row.size(); ++j) centroid[j] += row[j];
  }
  for (double& v : centroid) v /= static_cast<double>(k);

  for (std::size_t step = 0; step < config.max_steps; ++step) {
    double remaining = 0.0;
    for (std::size_t j = 0; j < centroid.size(); ++j) {
      const double diff = centroid[j] - result.features[j];
      remaining += diff * diff;
    }
    remaining = std::sqrt(remaining);
    if (remaining == 0.0) break;  // at the centroid; no further progress possible

    if (remaining <= config.step_size) {
      result.features = centroid;
    } else {
      const double scale = config.step_size / remaining;
      for (std::size_t j = 0; j < centroid.size(); ++j) {
        result.features[j] += scale * (centroid[j] - result.features[j]);
      }
    }
    result.steps_used = step + 1;
    if (surrogate.predict(result.features) == PriorityLabel::Low) {
      result.flipped = true;
      return result;
    }
  }
  return result;  // unconverged
}

AttackOutcome run_attack(const TrainedClassifier& edge, const Dataset& edge_train,
                         const Dataset& victims, const CaseConfig& case_cfg,
                         const EvasionAttackConfig& attack_cfg,
                         const CganConfig& cgan_cfg, const Hyperparams& hp) {
  case_cfg.validate();
  attack_cfg.validate();
  if (edge.feature_dim() != kFeatureDim) {
    fail(Errc::DimensionMismatch, kModule, "edge classifier has the wrong feature dim");
  }
  if (!victims.fully_labeled() || victims.empty()) {
    fail(Errc::InvalidArgument, kModule, "victims must be labeled");
  }

  AttackOutcome outcome;

  // step 1: collect real-time rows
  Dataset collected = collect(edge_train, case_cfg.collected_fraction, case_cfg.seed);

  // step 2: complete the dataset with the CGAN, or pass through
  if (case_cfg.case_id != CaseId::A && case_cfg.use_cgan) {
    CganConfig cgan = cgan_cfg;
    cgan.seed = derive_seed(case_cfg.seed, "adversary/cgan");
    auto [combined, model] = augment(collected, edge_train.size(), cgan);
    outcome.combined = std::move(combined);
    outcome.cgan = std::move(model);
  } else {
    outcome.combined.dataset = std::move(collected);
    outcome.combined.real_count = outcome.combined.dataset.size();
    outcome.combined.augmentation_skipped = true;
  }

  // step 3: surrogate selection over the six kinds
  outcome.selection = select_surrogate(outcome.combined, hp,
                                       derive_seed(case_cfg.seed, "adversary/select"));
  const TrainedClassifier& surrogate = *outcome.selection.chosen_model;

  // low-priority prototypes from the adversary's own combined dataset
  const Dataset& combined_data = outcome.combined.dataset;
  std::vector<std::size_t> low_rows;
  for (std::size_t i = 0; i < combined_data.size(); ++i) {
    if (*combined_data.labels[i] == PriorityLabel::Low) low_rows.push_back(i);
  }
  Matrix prototypes(low_rows.size(), kFeatureDim);
  for (std::size_t r = 0; r < low_rows.size(); ++r) {
    const auto row = combined_data.standardized_row(low_rows[r]);
    std::copy(row.begin(), row.end(), prototypes.row(r).begin());
  }

  // craft per High/Medium victim; Low victims pass through untouched
  outcome.victims.reserve(victims.size());
  for (std::size_t i = 0; i < victims.size(); ++i) {
    AttackedVictim v;
    v.true_label = *victims.labels[i];
    v.original = victims.standardized_row(i);
    if (v.true_label == PriorityLabel::Low) {
      v.perturbed = v.original;
    } else {
      v.attacked = true;
      CraftResult crafted =
          craft_evasion(v.original, surrogate, prototypes, attack_cfg);
      v.perturbed = std::move(crafted.features);
      v.steps_used = crafted.steps_used;
      v.flipped = crafted.flipped;
    }
    outcome.victims.push_back(std::move(v));
  }
  return outcome;
}

}  // namespace v2m
