#pragma once

#include <memory>
#include <optional>

#include "v2m/cgan.hpp"
#include "v2m/classifier.hpp"
#include "v2m/types.hpp"

namespace v2m {

/// The five knowledge cases: A is white-box (full training data), B through E
/// collect 80/60/40/20 percent of it.
enum class CaseId : std::uint8_t { A = 0, B, C, D, E };

inline constexpr std::array<CaseId, 5> kAllCases = {CaseId::A, CaseId::B, CaseId::C,
                                                    CaseId::D, CaseId::E};

std::string_view to_string(CaseId id);
std::optional<CaseId> case_from_string(std::string_view s);
double case_fraction(CaseId id);

struct CaseConfig {
  CaseId case_id = CaseId::A;
  double collected_fraction = 1.0;
  bool use_cgan = true;
  std::uint64_t seed = 0;

  static CaseConfig for_case(CaseId id, bool use_cgan, std::uint64_t seed) {
    return CaseConfig{id, case_fraction(id), use_cgan, seed};
  }

  /// Checks the fraction is one of the five allowed values and matches the
  /// case id. Case A never augments.
  void validate() const;
};

/// The adversary's training corpus: collected real rows plus CGAN output.
struct CombinedDataset {
  Dataset dataset;
  std::size_t real_count = 0;
  std::size_t generated_count = 0;
  bool augmentation_skipped = false;  // case A path
};

/// All six candidate models evaluated on the real-only test split, with the
/// lexicographic (accuracy, F1) winner.
struct SurrogateSelection {
  std::array<MetricsReport, kAllModelKinds.size()> reports;  // by ModelKind value
  ModelKind chosen = ModelKind::KNearestNeighbors;
  std::unique_ptr<TrainedClassifier> chosen_model;
  // split bookkeeping for audits
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t train_generated_count = 0;
  std::size_t test_real_count = 0;
};

struct EvasionAttackConfig {
  double step_size = 0.05;        // standardized units per step
  std::size_t max_steps = 200;
  std::size_t neighbor_count = 10;  // low-priority prototypes averaged

  void validate() const;
};

/// Stratified random subset of round(fraction * n) rows, provenance Real,
/// order preserved. fraction must be one of {1.0, 0.8, 0.6, 0.4, 0.2}.
Dataset collect(const Dataset& edge_train, double fraction, std::uint64_t seed);

/// Trains a CGAN on the collected rows and tops the dataset up to
/// target_total with generated rows, class counts proportional to the
/// collected class counts. When target_total equals the collected size the
/// augmentation step is skipped and no CGAN is trained.
std::pair<CombinedDataset, std::optional<CganModel>> augment(
    const Dataset& collected, std::size_t target_total, const CganConfig& config);

/// Trains all six kinds on the combined data. The test split is 20% of the
/// total drawn exclusively from Real rows (stratified); the train split is
/// every remaining real row plus all generated rows. Errors:
/// InsufficientRealData when real rows cannot fill the test split.
SurrogateSelection select_surrogate(const CombinedDataset& combined,
                                    const Hyperparams& hp, std::uint64_t seed);

struct CraftResult {
  std::vector<double> features;  // standardized, perturbed
  std::size_t steps_used = 0;
  bool flipped = false;  // surrogate says Low
};

/// Surrogate-guided prototype projection: steps the victim toward the fixed
/// centroid of its neighbor_count nearest Low prototypes until the surrogate
/// first predicts Low (minimal-step perturbation), the centroid is reached,
/// or max_steps runs out.
CraftResult craft_evasion(std::span<const double> x_std,
                          const TrainedClassifier& surrogate,
                          const Matrix& low_prototypes,
                          const EvasionAttackConfig& config);

struct AttackedVictim {
  std::vector<double> original;   // standardized features before perturbation
  std::vector<double> perturbed;  // equal to original for pass-through rows
  PriorityLabel true_label = PriorityLabel::Low;
  std::size_t steps_used = 0;
  bool flipped = false;
  bool attacked = false;  // High/Medium victims only; Low passes through
};

struct AttackOutcome {
  std::vector<AttackedVictim> victims;
  SurrogateSelection selection;
  CombinedDataset combined;
  std::optional<CganModel> cgan;
};

/// Full three-step pipeline for one case: collect, augment (or pass through),
/// select the surrogate, craft an evasion sample per High/Medium victim.
/// Deterministic per case.seed. The edge classifier is only used to validate
/// feature dimensions; scoring happens in the evaluation module.
AttackOutcome run_attack(const TrainedClassifier& edge, const Dataset& edge_train,
                         const Dataset& victims, const CaseConfig& case_cfg,
                         const EvasionAttackConfig& attack_cfg,
                         const CganConfig& cgan_cfg, const Hyperparams& hp = {});

}  // namespace v2m
