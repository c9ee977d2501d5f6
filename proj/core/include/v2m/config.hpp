#pragma once

#include <filesystem>
#include <string>

#include "v2m/adversary.hpp"
#include "v2m/dataset.hpp"
#include "v2m/evaluation.hpp"

namespace v2m {

/// Declarative run configuration: one file drives scenario generation, edge
/// training, single attacks and the full experiment grid. Validation is total
/// before any command touches the output directory.
struct RunConfig {
  struct DatasetSection {
    std::string source = "synthetic";  // "synthetic" | "csv"
    std::string csv_path;
    std::size_t total_size = 2000;
    ScenarioProfile profile;
    std::size_t kmeans_restarts = 10;
    std::size_t victims_per_class = 100;
  } dataset;

  struct EdgeSection {
    std::size_t knn_k = 5;
    bool compare_lr_svm = true;
    double holdout_train_frac = 0.8;
  } edge;

  Hyperparams models;
  CganConfig cgan;
  EvasionAttackConfig attack;

  struct GridSection {
    std::size_t n_seeds = 10;
  } grid;

  std::uint64_t master_seed = 42;
  std::string output_dir = "out";
  std::size_t jobs = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Default configuration for the desk-scale benchmark. The CGAN section is
/// trimmed (fewer epochs than the standalone default) so the ten-seed grid
/// finishes in minutes.
RunConfig default_run_config();

std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace v2m
