#include "v2m/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "v2m/csv.hpp"
#include "v2m/errors.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "evaluation";

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;  // fixed index order for float determinism
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) {
    const double dev = x - mean;
    s += dev * dev;
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<VictimSample> attacked_samples(const std::vector<AttackedVictim>& victims,
                                           bool perturbed) {
  std::vector<VictimSample> out;
  for (const auto& v : victims) {
    if (!v.attacked) continue;
    out.push_back({perturbed ? v.perturbed : v.original, v.true_label});
  }
  return out;
}

std::string cell_name(const CellSpec& spec) {
  std::string name(to_string(spec.case_id));
  if (spec.case_id != CaseId::A) {
    name += spec.use_cgan ? "/cgan" : "/no-cgan";
  }
  return name;
}

std::string percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%6.2f%%", 100.0 * value);
  return std::string(buf);
}

}  // namespace

std::pair<EvasionCounts, double> score_adr(const TrainedClassifier& edge,
                                           const std::vector<VictimSample>& attacked) {
  if (attacked.empty()) {
    fail(Errc::EmptyVictimSet, kModule, "no attacked victims to score");
  }
  EvasionCounts counts;
  for (const auto& v : attacked) {
    if (v.true_label == PriorityLabel::Low) {
      fail(Errc::InvalidArgument, kModule,
           "attacked victims must be truly High or Medium");
    }
    const PriorityLabel pred = edge.predict(v.features);
    if (pred == PriorityLabel::Low) {
      counts.fp++;  // fooled: the attacker's target outcome
    } else {
      counts.tn++;  // still detected as a non-Low request
    }
  }
  const double adr = static_cast<double>(counts.tn) /
                     static_cast<double>(counts.tn + counts.fp);
  return {counts, adr};
}

double score_eir(double adr_adversarial, double tnr_original) {
  if (!(tnr_original > 0.0)) {
    fail(Errc::ZeroOriginalTnr, kModule,
         "original TNR is zero; EIR is undefined for this cell");
  }
  return 1.0 - adr_adversarial / tnr_original;
}

std::vector<CellSpec> default_grid_cells() {
  std::vector<CellSpec> cells;
  cells.push_back({CaseId::A, true});  // augmentation skipped either way
  for (CaseId id : {CaseId::B, CaseId::C, CaseId::D, CaseId::E}) {
    cells.push_back({id, true});
  }
  for (CaseId id : {CaseId::B, CaseId::C, CaseId::D, CaseId::E}) {
    cells.push_back({id, false});
  }
  return cells;
}

CellResult run_cell(const CellSpec& spec, std::span<const std::uint64_t> seeds,
                    const CellFixtures& fixtures) {
  if (seeds.empty()) {
    fail(Errc::InvalidArgument, kModule, "run_cell needs at least one seed");
  }
  if (fixtures.edge == nullptr || fixtures.edge_train == nullptr ||
      fixtures.victims == nullptr) {
    fail(Errc::InvalidArgument, kModule, "missing shared fixtures");
  }

  CellResult result;
  result.spec = spec;
  result.report.case_id = spec.case_id;
  result.report.use_cgan = spec.use_cgan;
  result.report.seeds_aggregated = seeds.size();

  // detection rate on the identical victims before any perturbation
  std::vector<VictimSample> clean;
  for (std::size_t i = 0; i < fixtures.victims->size(); ++i) {
    const PriorityLabel label = *fixtures.victims->labels[i];
    if (label == PriorityLabel::Low) continue;
    clean.push_back({fixtures.victims->standardized_row(i), label});
  }
  const auto [clean_counts, tnr_original] = score_adr(*fixtures.edge, clean);
  result.report.tnr_original = tnr_original;
  if (!(tnr_original > 0.0)) {
    fail(Errc::ZeroOriginalTnr, kModule,
         "cell " + cell_name(spec) + ": original TNR is zero");
  }

  for (std::size_t s = 0; s < seeds.size(); ++s) {
    try {
      const CaseConfig case_cfg =
          CaseConfig::for_case(spec.case_id, spec.use_cgan, seeds[s]);
      AttackOutcome outcome =
          run_attack(*fixtures.edge, *fixtures.edge_train, *fixtures.victims,
                     case_cfg, fixtures.attack, fixtures.cgan, fixtures.hp);

      const auto [counts, adr] =
          score_adr(*fixtures.edge, attacked_samples(outcome.victims, true));
      const double eir = score_eir(adr, tnr_original);

      result.report.counts.tn += counts.tn;
      result.report.counts.fp += counts.fp;
      result.report.per_seed_adr.push_back(adr);
      result.report.per_seed_eir.push_back(eir);

      for (ModelKind kind : kAllModelKinds) {
        const auto k = static_cast<std::size_t>(kind);
        result.surrogates.per_seed_accuracy[k].push_back(
            outcome.selection.reports[k].accuracy);
        result.surrogates.per_seed_macro_f1[k].push_back(
            outcome.selection.reports[k].macro_f1);
      }
      result.surrogates.chosen_count[static_cast<std::size_t>(
          outcome.selection.chosen)]++;
      result.surrogates.per_seed_chosen_accuracy.push_back(
          outcome.selection
              .reports[static_cast<std::size_t>(outcome.selection.chosen)]
              .accuracy);

      if (s == 0) {
        result.combined_counts = {outcome.combined.real_count,
                                  outcome.combined.generated_count};
      }
    } catch (const Error& e) {
      if (e.code() == Errc::ZeroOriginalTnr || e.code() == Errc::InvalidArgument) {
        throw;
      }
      fail(e.code(), kModule,
           "cell " + cell_name(spec) + " seed " + std::to_string(seeds[s]) +
               ": " + e.what());
    }
  }

  result.report.adr = mean_of(result.report.per_seed_adr);
  result.report.eir = mean_of(result.report.per_seed_eir);
  result.report.adr_stddev = stddev_of(result.report.per_seed_adr, result.report.adr);
  result.report.eir_stddev = stddev_of(result.report.per_seed_eir, result.report.eir);

  for (std::size_t k = 0; k < kAllModelKinds.size(); ++k) {
    result.surrogates.mean_accuracy[k] = mean_of(result.surrogates.per_seed_accuracy[k]);
    result.surrogates.mean_macro_f1[k] = mean_of(result.surrogates.per_seed_macro_f1[k]);
  }
  // modal chosen kind; ties follow the surrogate preference order
  result.surrogates.modal_kind = kSurrogatePreference[0];
  std::size_t best_count = 0;
  for (ModelKind kind : kSurrogatePreference) {
    const auto k = static_cast<std::size_t>(kind);
    if (result.surrogates.chosen_count[k] > best_count) {
      best_count = result.surrogates.chosen_count[k];
      result.surrogates.modal_kind = kind;
    }
  }
  result.report.surrogate_kind = result.surrogates.modal_kind;
  {
    const auto k = static_cast<std::size_t>(result.surrogates.modal_kind);
    result.surrogates.modal_accuracy_mean = result.surrogates.mean_accuracy[k];
    result.surrogates.modal_f1_mean = result.surrogates.mean_macro_f1[k];
    result.surrogates.modal_accuracy_stddev =
        stddev_of(result.surrogates.per_seed_accuracy[k],
                  result.surrogates.modal_accuracy_mean);
    result.surrogates.modal_f1_stddev =
        stddev_of(result.surrogates.per_seed_macro_f1[k],
                  result.surrogates.modal_f1_mean);
  }
  return result;
}

ExperimentGrid run_experiment(const ExperimentSpec& spec, const CellFixtures& fixtures) {
  if (spec.seeds.empty()) {
    fail(Errc::InvalidArgument, kModule, "experiment needs at least one seed");
  }
  if (spec.cells.empty()) {
    fail(Errc::InvalidArgument, kModule, "experiment needs at least one cell");
  }
  std::filesystem::create_directories(spec.output_dir);

  ExperimentGrid grid;
  grid.seeds = spec.seeds;
  grid.cells.resize(spec.cells.size());

  const std::size_t jobs =
      std::max<std::size_t>(1, std::min(spec.jobs, spec.cells.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < spec.cells.size(); ++i) {
      grid.cells[i] = run_cell(spec.cells[i], spec.seeds, fixtures);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(spec.cells.size());
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= spec.cells.size()) return;
          try {
            grid.cells[i] = run_cell(spec.cells[i], spec.seeds, fixtures);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // report emission, fixed order
  const auto emit = [&](const std::string& name, const std::string& contents) {
    write_text_file(spec.output_dir / name, contents);
  };
  emit("surrogate_table.csv", render_surrogate_table_csv(grid));
  emit("surrogate_table.txt", render_surrogate_table_text(grid));
  emit("adr_eir_with_cgan.csv", render_adr_eir_csv(grid, true));
  emit("adr_eir_with_cgan.txt", render_adr_eir_text(grid, true));
  emit("adr_eir_without_cgan.csv", render_adr_eir_csv(grid, false));
  emit("adr_eir_without_cgan.txt", render_adr_eir_text(grid, false));

  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["seeds"] = grid.seeds;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : grid.cells) {
    cells.push_back(nlohmann::json{
        {"case", std::string(to_string(cell.spec.case_id))},
        {"use_cgan", cell.spec.use_cgan},
        {"real_count", cell.combined_counts[0]},
        {"generated_count", cell.combined_counts[1]},
        {"surrogate", std::string(to_string(cell.report.surrogate_kind))},
        {"adr_mean", cell.report.adr},
        {"adr_stddev", cell.report.adr_stddev},
        {"eir_mean", cell.report.eir},
        {"eir_stddev", cell.report.eir_stddev},
        {"tnr_original", cell.report.tnr_original},
        {"tn", cell.report.counts.tn},
        {"fp", cell.report.counts.fp},
    });
  }
  manifest["cells"] = cells;
  manifest["attack"] = nlohmann::json{{"step_size", fixtures.attack.step_size},
                                      {"max_steps", fixtures.attack.max_steps},
                                      {"neighbor_count", fixtures.attack.neighbor_count}};
  manifest["cgan"] = nlohmann::json{{"latent_dim", fixtures.cgan.latent_dim},
                                    {"embed_dim", fixtures.cgan.embed_dim},
                                    {"gen_layers", fixtures.cgan.gen_layers},
                                    {"disc_layers", fixtures.cgan.disc_layers},
                                    {"epochs", fixtures.cgan.epochs},
                                    {"batch_size", fixtures.cgan.batch_size},
                                    {"learning_rate", fixtures.cgan.learning_rate}};
  nlohmann::json hashes;
  for (const char* name :
       {"surrogate_table.csv", "surrogate_table.txt", "adr_eir_with_cgan.csv",
        "adr_eir_with_cgan.txt", "adr_eir_without_cgan.csv",
        "adr_eir_without_cgan.txt"}) {
    hashes[name] = file_hash_hex(spec.output_dir / name);
  }
  manifest["report_hashes"] = hashes;
  write_text_file(spec.output_dir / "manifest.json", manifest.dump(2) + "\n");

  return grid;
}

std::string render_surrogate_table_csv(const ExperimentGrid& grid) {
  std::string out = "case,surrogate,metric,mean,stddev,n_seeds\n";
  for (const auto& cell : grid.cells) {
    if (!cell.spec.use_cgan) continue;  // surrogate table covers the CGAN mode
    const std::string case_name(to_string(cell.spec.case_id));
    const std::string kind(to_string(cell.surrogates.modal_kind));
    const std::string n = std::to_string(cell.report.seeds_aggregated);
    out += case_name + "," + kind + ",accuracy," +
           format_double(cell.surrogates.modal_accuracy_mean) + "," +
           format_double(cell.surrogates.modal_accuracy_stddev) + "," + n + "\n";
    out += case_name + "," + kind + ",macro_f1," +
           format_double(cell.surrogates.modal_f1_mean) + "," +
           format_double(cell.surrogates.modal_f1_stddev) + "," + n + "\n";
  }
  return out;
}

std::string render_surrogate_table_text(const ExperimentGrid& grid) {
  std::string out;
  out += "Surrogate model selection (with CGAN augmentation)\n";
  out += "---------------------------------------------------------------\n";
  out += "Case  Surrogate               Accuracy   Macro-F1\n";
  for (const auto& cell : grid.cells) {
    if (!cell.spec.use_cgan) continue;
    char line[128];
    std::snprintf(line, sizeof(line), "%-5s %-22s %8s   %8s\n",
                  std::string(to_string(cell.spec.case_id)).c_str(),
                  std::string(to_string(cell.surrogates.modal_kind)).c_str(),
                  percent(cell.surrogates.modal_accuracy_mean).c_str(),
                  percent(cell.surrogates.modal_f1_mean).c_str());
    out += line;
  }
  return out;
}

std::string render_adr_eir_csv(const ExperimentGrid& grid, bool with_cgan) {
  std::string out = "case,surrogate,metric,mean,stddev,n_seeds\n";
  for (const auto& cell : grid.cells) {
    if (cell.spec.use_cgan != with_cgan) continue;
    if (!with_cgan && cell.spec.case_id == CaseId::A) continue;
    const std::string case_name(to_string(cell.spec.case_id));
    const std::string kind(to_string(cell.report.surrogate_kind));
    const std::string n = std::to_string(cell.report.seeds_aggregated);
    out += case_name + "," + kind + ",adr," + format_double(cell.report.adr) + "," +
           format_double(cell.report.adr_stddev) + "," + n + "\n";
    out += case_name + "," + kind + ",eir," + format_double(cell.report.eir) + "," +
           format_double(cell.report.eir_stddev) + "," + n + "\n";
  }
  return out;
}

std::string render_adr_eir_text(const ExperimentGrid& grid, bool with_cgan) {
  std::string out;
  out += with_cgan ? "Evasion attack impact (with CGAN augmentation)\n"
                   : "Evasion attack impact (without CGAN augmentation)\n";
  out += "---------------------------------------------------------------\n";
  out += "Case  Surrogate                    ADR        EIR\n";
  for (const auto& cell : grid.cells) {
    if (cell.spec.use_cgan != with_cgan) continue;
    if (!with_cgan && cell.spec.case_id == CaseId::A) continue;
    char line[128];
    std::snprintf(line, sizeof(line), "%-5s %-22s %9s  %9s\n",
                  std::string(to_string(cell.spec.case_id)).c_str(),
                  std::string(to_string(cell.report.surrogate_kind)).c_str(),
                  percent(cell.report.adr).c_str(),
                  percent(cell.report.eir).c_str());
    out += line;
  }
  return out;
}

}  // namespace v2m
