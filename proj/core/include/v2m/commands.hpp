#pragma once

#include <iosfwd>
#include <memory>

#include "v2m/config.hpp"
#include "v2m/evaluation.hpp"
#include "v2m/kmeans.hpp"

namespace v2m {

/// Everything the attack and experiment stages share, built deterministically
/// from one config: the labeled balanced dataset, the victim holdout, the
/// clustering model and the edge classifier.
struct BenchmarkFixtures {
  Dataset edge_train;
  Dataset victims;
  KMeansModel kmeans;
  std::unique_ptr<TrainedClassifier> edge;
};

BenchmarkFixtures build_fixtures(const RunConfig& config);

/// gen-data: writes dataset.csv, victims.csv, normalizer.json, kmeans.json
/// under output_dir.
void cmd_gen_data(const RunConfig& config);

/// train-edge: reads gen-data outputs, writes edge_knn.json and
/// edge_metrics.json (K-NN holdout metrics, optionally compared with SVM/LR).
void cmd_train_edge(const RunConfig& config);

/// attack: one case, one derived seed; writes the combined dataset, surrogate
/// checkpoint, perturbed victims, CGAN artifacts and a one-cell report under
/// output_dir/attack_<case>[_nocgan]/. Reads the gen-data/train-edge outputs.
void cmd_attack(const RunConfig& config, CaseId case_id, bool use_cgan);

/// experiment: self-contained; builds fixtures in memory, runs the full grid
/// and writes the three report tables plus manifest under output_dir. The
/// three human-readable tables are echoed to `out`.
ExperimentGrid cmd_experiment(const RunConfig& config, std::ostream& out);

/// Seed list used by the experiment grid for a given config.
std::vector<std::uint64_t> grid_seeds(const RunConfig& config);

}  // namespace v2m
