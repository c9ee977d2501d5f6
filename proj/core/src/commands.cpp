#include "v2m/commands.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "v2m/csv.hpp"
#include "v2m/errors.hpp"
#include "v2m/model_io.hpp"
#include "v2m/rng.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "cli";

using nlohmann::json;

Dataset load_source(const RunConfig& config) {
  if (config.dataset.source == "csv") {
    return load_csv(config.dataset.csv_path);
  }
  return generate_scenario(config.dataset.total_size,
                           derive_seed(config.master_seed, "dataset"),
                           config.dataset.profile);
}

/// Synthesizes a stratified victim holdout: fresh rows from the profile,
/// labeled by the fitted clustering, victims_per_class of each priority.
Dataset make_victims(const RunConfig& config, const Normalizer& norm,
                     const KMeansModel& kmeans) {
  const std::size_t per_class = config.dataset.victims_per_class;
  Dataset victims;
  victims.norm = norm;
  std::array<std::size_t, kNumClasses> filled{};

  const std::uint64_t seed = derive_seed(config.master_seed, "victims");
  const std::size_t chunk = 256;
  for (std::size_t round = 0; round < 4000; ++round) {
    const Dataset batch = generate_scenario(
        chunk, derive_seed(seed, "chunk/" + std::to_string(round)),
        config.dataset.profile);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto feats = batch.observations[i].features();
      const PriorityLabel label = kmeans.priority_of(norm.standardize(feats));
      const auto c = static_cast<std::size_t>(label);
      if (filled[c] >= per_class) continue;
      victims.push_back(batch.observations[i], label, Provenance::Real);
      filled[c]++;
    }
    if (filled[0] >= per_class && filled[1] >= per_class && filled[2] >= per_class) {
      return victims;
    }
  }
  fail(Errc::ClassTooSmall, kModule,
       "could not synthesize victims for every priority class");
}

/// CSV sources carve the victim holdout out of the file rows instead, keeping
/// it disjoint from the training data.
std::pair<Dataset, Dataset> split_off_victims(const Dataset& labeled,
                                              std::size_t per_class,
                                              std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    by_class[static_cast<std::size_t>(*labeled.labels[i])].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> victim_idx, rest_idx;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& idx = by_class[c];
    if (idx.size() <= per_class) {
      fail(Errc::ClassTooSmall, kModule,
           "csv source too small to carve out the victim holdout");
    }
    rng.shuffle(idx);
    victim_idx.insert(victim_idx.end(), idx.begin(), idx.begin() + per_class);
    rest_idx.insert(rest_idx.end(), idx.begin() + per_class, idx.end());
  }
  std::sort(victim_idx.begin(), victim_idx.end());
  std::sort(rest_idx.begin(), rest_idx.end());
  return {labeled.subset(victim_idx), labeled.subset(rest_idx)};
}

struct Pipeline {
  Dataset edge_train;
  Dataset victims;
  KMeansModel kmeans;
};

Pipeline build_pipeline(const RunConfig& config) {
  Pipeline p;
  Dataset raw = load_source(config);
  raw.norm = fit_normalizer(raw);

  p.kmeans = kmeans_fit(raw, kNumClasses, config.dataset.kmeans_restarts,
                        derive_seed(config.master_seed, "kmeans"));
  Dataset labeled = label_dataset(raw, p.kmeans);

  if (config.dataset.source == "csv") {
    auto [victims, rest] =
        split_off_victims(labeled, config.dataset.victims_per_class,
                          derive_seed(config.master_seed, "victims"));
    p.victims = std::move(victims);
    p.edge_train = rebalance_classes(rest, config.dataset.total_size,
                                     derive_seed(config.master_seed, "rebalance"));
  } else {
    p.edge_train = rebalance_classes(labeled, config.dataset.total_size,
                                     derive_seed(config.master_seed, "rebalance"));
    p.victims = make_victims(config, *raw.norm, p.kmeans);
  }
  return p;
}

std::string normalizer_to_json(const Normalizer& norm) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "normalizer";
  j["mean"] = norm.mean;
  j["stddev"] = norm.stddev;
  return j.dump(2) + "\n";
}

Normalizer normalizer_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("kind", "") != "normalizer") {
    fail(Errc::Io, kModule, "not a normalizer file");
  }
  Normalizer norm;
  norm.mean = j.at("mean").get<std::vector<double>>();
  norm.stddev = j.at("stddev").get<std::vector<double>>();
  return norm;
}

std::size_t effective_jobs(const RunConfig& config) {
  if (config.jobs > 0) return config.jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

json metrics_to_json(const MetricsReport& m) {
  return json{{"accuracy", m.accuracy},
              {"macro_f1", m.macro_f1},
              {"total", m.total}};
}

}  // namespace

BenchmarkFixtures build_fixtures(const RunConfig& config) {
  config.validate();
  Pipeline p = build_pipeline(config);
  BenchmarkFixtures fixtures;
  fixtures.edge = fit_classifier(ModelKind::KNearestNeighbors, p.edge_train,
                                 Hyperparams{.knn = {config.edge.knn_k}},
                                 derive_seed(config.master_seed, "edge"));
  fixtures.edge_train = std::move(p.edge_train);
  fixtures.victims = std::move(p.victims);
  fixtures.kmeans = std::move(p.kmeans);
  return fixtures;
}

void cmd_gen_data(const RunConfig& config) {
  config.validate();
  Pipeline p = build_pipeline(config);

  const std::filesystem::path out(config.output_dir);
  std::filesystem::create_directories(out);
  save_dataset_csv(p.edge_train, out / "dataset.csv");
  save_dataset_csv(p.victims, out / "victims.csv");
  write_text_file(out / "normalizer.json", normalizer_to_json(*p.edge_train.norm));
  write_text_file(out / "kmeans.json", serialize_kmeans(p.kmeans));
}

void cmd_train_edge(const RunConfig& config) {
  config.validate();
  const std::filesystem::path out(config.output_dir);
  Dataset data = load_dataset_csv(out / "dataset.csv");
  data.norm = normalizer_from_json(read_text_file(out / "normalizer.json"));
  if (!data.fully_labeled()) {
    fail(Errc::InvalidArgument, kModule, "dataset.csv is not fully labeled");
  }

  Hyperparams hp = config.models;
  hp.knn.k = config.edge.knn_k;

  // holdout comparison pass
  const auto [train, test] =
      split(data, config.edge.holdout_train_frac,
            derive_seed(config.master_seed, "edge/holdout"), true);
  json metrics;
  const auto knn_holdout = fit_classifier(ModelKind::KNearestNeighbors, train, hp,
                                          derive_seed(config.master_seed, "edge"));
  const MetricsReport knn_report = evaluate(*knn_holdout, test);
  metrics["knn"] = metrics_to_json(knn_report);
  bool knn_best = true;
  if (config.edge.compare_lr_svm) {
    const auto svm = fit_classifier(ModelKind::SupportVectorMachine, train, hp,
                                    derive_seed(config.master_seed, "edge/svm"));
    const auto lr = fit_classifier(ModelKind::LogisticRegression, train, hp,
                                   derive_seed(config.master_seed, "edge/lr"));
    const MetricsReport svm_report = evaluate(*svm, test);
    const MetricsReport lr_report = evaluate(*lr, test);
    metrics["svm"] = metrics_to_json(svm_report);
    metrics["lr"] = metrics_to_json(lr_report);
    knn_best = knn_report.accuracy >= svm_report.accuracy &&
               knn_report.accuracy >= lr_report.accuracy;
  }
  // recorded, not enforced: on synthetic data another kind may well win
  metrics["knn_best"] = knn_best;

  // the deployed edge model trains on the full labeled dataset
  const auto edge = fit_classifier(ModelKind::KNearestNeighbors, data, hp,
                                   derive_seed(config.master_seed, "edge"));
  write_text_file(out / "edge_knn.json", serialize_classifier(*edge));
  write_text_file(out / "edge_metrics.json", metrics.dump(2) + "\n");
}

void cmd_attack(const RunConfig& config, CaseId case_id, bool use_cgan) {
  config.validate();
  const std::filesystem::path out(config.output_dir);

  Dataset edge_train = load_dataset_csv(out / "dataset.csv");
  edge_train.norm = normalizer_from_json(read_text_file(out / "normalizer.json"));
  Dataset victims = load_dataset_csv(out / "victims.csv");
  victims.norm = edge_train.norm;
  const auto edge = deserialize_classifier(read_text_file(out / "edge_knn.json"));

  const std::uint64_t case_seed = derive_seed(
      config.master_seed, "attack/" + std::string(to_string(case_id)) +
                              (use_cgan ? "/cgan" : "/no-cgan"));
  CganConfig cgan_cfg = config.cgan;
  const CaseConfig case_cfg = CaseConfig::for_case(case_id, use_cgan, case_seed);
  AttackOutcome outcome = run_attack(*edge, edge_train, victims, case_cfg,
                                     config.attack, cgan_cfg, config.models);

  std::vector<VictimSample> clean, attacked;
  for (const auto& v : outcome.victims) {
    if (!v.attacked) continue;
    clean.push_back({v.original, v.true_label});
    attacked.push_back({v.perturbed, v.true_label});
  }
  const auto [clean_counts, tnr_original] = score_adr(*edge, clean);
  const auto [counts, adr] = score_adr(*edge, attacked);
  const double eir = score_eir(adr, tnr_original);

  std::string dir_name = "attack_" + std::string(to_string(case_id));
  if (!use_cgan && case_id != CaseId::A) dir_name += "_nocgan";
  const std::filesystem::path case_dir = out / dir_name;
  std::filesystem::create_directories(case_dir);

  save_dataset_csv(outcome.combined.dataset, case_dir / "combined_dataset.csv");
  write_text_file(case_dir / "surrogate.json",
                  serialize_classifier(*outcome.selection.chosen_model));
  if (outcome.cgan.has_value()) {
    write_text_file(case_dir / "cgan.json", serialize_cgan(*outcome.cgan));
  }

  // perturbed victims in raw units, with the attack bookkeeping columns
  {
    std::string csv;
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      csv += kFeatureNames[j];
      csv += ',';
    }
    csv += "true_label,attacked,steps_used,flipped\n";
    const Normalizer& norm = *edge_train.norm;
    for (const auto& v : outcome.victims) {
      const auto raw = norm.destandardize(v.perturbed);
      for (double x : raw) {
        csv += format_double(x);
        csv += ',';
      }
      csv += to_string(v.true_label);
      csv += v.attacked ? ",1," : ",0,";
      csv += std::to_string(v.steps_used);
      csv += v.flipped ? ",1\n" : ",0\n";
    }
    write_text_file(case_dir / "perturbed_victims.csv", csv);
  }

  json report;
  report["case"] = std::string(to_string(case_id));
  report["use_cgan"] = use_cgan;
  report["seed"] = case_seed;
  report["surrogate"] = std::string(to_string(outcome.selection.chosen));
  report["real_count"] = outcome.combined.real_count;
  report["generated_count"] = outcome.combined.generated_count;
  report["augmentation_skipped"] = outcome.combined.augmentation_skipped;
  report["tn"] = counts.tn;
  report["fp"] = counts.fp;
  report["adr"] = adr;
  report["tnr_original"] = tnr_original;
  report["eir"] = eir;
  write_text_file(case_dir / "report.json", report.dump(2) + "\n");

  json manifest;
  manifest["case"] = std::string(to_string(case_id));
  manifest["use_cgan"] = use_cgan;
  manifest["seed"] = case_seed;
  manifest["master_seed"] = config.master_seed;
  manifest["real_count"] = outcome.combined.real_count;
  manifest["generated_count"] = outcome.combined.generated_count;
  manifest["config"] = json::parse(run_config_to_json(config));
  json hashes;
  for (const auto& entry : std::filesystem::directory_iterator(case_dir)) {
    if (entry.path().filename() == "manifest.json") continue;
    hashes[entry.path().filename().string()] = file_hash_hex(entry.path());
  }
  manifest["file_hashes"] = hashes;
  write_text_file(case_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<std::uint64_t> grid_seeds(const RunConfig& config) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(config.grid.n_seeds);
  for (std::size_t i = 0; i < config.grid.n_seeds; ++i) {
    seeds.push_back(derive_seed(config.master_seed, "grid/seed/" + std::to_string(i)));
  }
  return seeds;
}

ExperimentGrid cmd_experiment(const RunConfig& config, std::ostream& out) {
  config.validate();
  const BenchmarkFixtures fixtures = build_fixtures(config);

  ExperimentSpec spec;
  spec.seeds = grid_seeds(config);
  spec.output_dir = config.output_dir;
  spec.jobs = effective_jobs(config);

  CellFixtures cell_fixtures;
  cell_fixtures.edge = fixtures.edge.get();
  cell_fixtures.edge_train = &fixtures.edge_train;
  cell_fixtures.victims = &fixtures.victims;
  cell_fixtures.hp = config.models;
  cell_fixtures.cgan = config.cgan;
  cell_fixtures.attack = config.attack;

  ExperimentGrid grid = run_experiment(spec, cell_fixtures);

  // reproducibility record alongside the reports
  write_text_file(std::filesystem::path(config.output_dir) / "run_config.json",
                  run_config_to_json(config));

  out << render_surrogate_table_text(grid) << "\n";
  out << render_adr_eir_text(grid, true) << "\n";
  out << render_adr_eir_text(grid, false);
  return grid;
}

}  // namespace v2m
