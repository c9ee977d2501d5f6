#pragma once

#include <filesystem>
#include <vector>

#include "v2m/adversary.hpp"

namespace v2m {

/// Counts over attacked (truly High/Medium) victims as seen by the edge
/// classifier: tn = still classified non-Low, fp = classified Low (fooled).
struct EvasionCounts {
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
};

struct VictimSample {
  std::vector<double> features;  // standardized
  PriorityLabel true_label = PriorityLabel::High;
};

/// ADR = TN / (TN + FP) over the attacked victims. The function sees only the
/// edge classifier and true labels, never the surrogate. Errors:
/// EmptyVictimSet; InvalidArgument when a victim is truly Low.
std::pair<EvasionCounts, double> score_adr(const TrainedClassifier& edge,
                                           const std::vector<VictimSample>& attacked);

/// EIR = 1 - adr_adversarial / tnr_original. May be negative when the attack
/// helps the classifier. Errors: ZeroOriginalTnr.
double score_eir(double adr_adversarial, double tnr_original);

/// Mean/stddev aggregate of one experiment cell over its seed list. Stddev is
/// the population convention, so one seed reports 0.
struct EvasionReport {
  CaseId case_id = CaseId::A;
  bool use_cgan = true;
  ModelKind surrogate_kind = ModelKind::KNearestNeighbors;  // modal across seeds
  double adr = 0.0;           // mean
  double tnr_original = 0.0;  // same victims unperturbed, same edge model
  double eir = 0.0;           // mean
  EvasionCounts counts;       // summed across seeds
  std::size_t seeds_aggregated = 0;
  double adr_stddev = 0.0;
  double eir_stddev = 0.0;
  std::vector<double> per_seed_adr;
  std::vector<double> per_seed_eir;
};

/// Per-cell surrogate summary across seeds: every kind's per-seed test
/// metrics plus how often each kind won the selection.
struct SurrogateSummary {
  std::array<std::vector<double>, kAllModelKinds.size()> per_seed_accuracy;
  std::array<std::vector<double>, kAllModelKinds.size()> per_seed_macro_f1;
  std::array<double, kAllModelKinds.size()> mean_accuracy{};
  std::array<double, kAllModelKinds.size()> mean_macro_f1{};
  std::array<std::size_t, kAllModelKinds.size()> chosen_count{};
  ModelKind modal_kind = ModelKind::KNearestNeighbors;
  double modal_accuracy_mean = 0.0;
  double modal_accuracy_stddev = 0.0;
  double modal_f1_mean = 0.0;
  double modal_f1_stddev = 0.0;
  /// The winning model's accuracy each seed (whatever kind won that seed).
  std::vector<double> per_seed_chosen_accuracy;
};

struct CellSpec {
  CaseId case_id = CaseId::A;
  bool use_cgan = true;
};

/// Immutable shared fixtures every cell runs against.
struct CellFixtures {
  const TrainedClassifier* edge = nullptr;
  const Dataset* edge_train = nullptr;
  const Dataset* victims = nullptr;
  Hyperparams hp;
  CganConfig cgan;
  EvasionAttackConfig attack;
};

struct CellResult {
  CellSpec spec;
  EvasionReport report;
  SurrogateSummary surrogates;
  std::array<std::size_t, 2> combined_counts{};  // real, generated (first seed)
};

/// Runs adversary.run_attack once per seed and aggregates ADR/EIR against the
/// edge classifier. Deterministic for a fixed seed list; a failing seed aborts
/// the cell with the seed identified in the message.
CellResult run_cell(const CellSpec& spec, std::span<const std::uint64_t> seeds,
                    const CellFixtures& fixtures);

/// The full grid: case A once, B through E in both CGAN modes (9 cells).
std::vector<CellSpec> default_grid_cells();

struct ExperimentSpec {
  std::vector<CellSpec> cells = default_grid_cells();
  std::vector<std::uint64_t> seeds;  // shared by every cell
  std::filesystem::path output_dir;
  std::size_t jobs = 1;
};

struct ExperimentGrid {
  std::vector<CellResult> cells;
  std::vector<std::uint64_t> seeds;
};

/// Computes all cells (optionally in parallel; results are independent of the
/// worker count) and writes the three report tables as CSV and aligned text
/// plus a manifest naming seeds, configs and file hashes.
ExperimentGrid run_experiment(const ExperimentSpec& spec, const CellFixtures& fixtures);

/// Report renderers (also used by the single-cell attack command).
std::string render_surrogate_table_csv(const ExperimentGrid& grid);
std::string render_surrogate_table_text(const ExperimentGrid& grid);
std::string render_adr_eir_csv(const ExperimentGrid& grid, bool with_cgan);
std::string render_adr_eir_text(const ExperimentGrid& grid, bool with_cgan);

}  // namespace v2m
