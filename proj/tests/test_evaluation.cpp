#include <doctest.h>

#include <cmath>

#include "v2m/commands.hpp"
#include "v2m/csv.hpp"
#include "v2m/errors.hpp"
#include "v2m/evaluation.hpp"
#include "test_util.hpp"

using namespace v2m;

namespace {

/// Edge stand-in that classifies by the first feature: >= hi is High,
/// >= lo is Medium, else Low.
class BandEdge final : public TrainedClassifier {
 public:
  BandEdge(double lo, double hi) : lo_(lo), hi_(hi) {}
  ModelKind kind() const noexcept override { return ModelKind::KNearestNeighbors; }
  std::size_t feature_dim() const noexcept override { return kFeatureDim; }

 private:
  PriorityLabel do_predict(std::span<const double> x) const override {
    if (x[0] >= hi_) return PriorityLabel::High;
    if (x[0] >= lo_) return PriorityLabel::Medium;
    return PriorityLabel::Low;
  }
  double lo_, hi_;
};

VictimSample victim_at(double x0, PriorityLabel label) {
  VictimSample v;
  v.features.assign(kFeatureDim, 0.0);
  v.features[0] = x0;
  v.true_label = label;
  return v;
}

/// Small, fast fixture set shared by the cell tests.
struct SmallBench {
  RunConfig config;
  BenchmarkFixtures fixtures;
  CellFixtures cells;

  explicit SmallBench(std::uint64_t seed) {
    config = default_run_config();
    config.dataset.total_size = 300;
    config.dataset.victims_per_class = 20;
    config.dataset.kmeans_restarts = 3;
    config.cgan = test::tiny_cgan_config(seed, 8);
    config.models.forest.n_trees = 10;
    config.models.logistic.epochs = 120;
    config.models.svm.epochs = 120;
    config.master_seed = seed;
    fixtures = build_fixtures(config);
    cells.edge = fixtures.edge.get();
    cells.edge_train = &fixtures.edge_train;
    cells.victims = &fixtures.victims;
    cells.hp = config.models;
    cells.cgan = config.cgan;
    cells.attack = config.attack;
  }
};

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("score_adr extremes") {
  const BandEdge edge(0.3, 0.7);

  std::vector<VictimSample> all_low;
  for (int i = 0; i < 10; ++i) all_low.push_back(victim_at(0.0, PriorityLabel::High));
  const auto [c0, adr0] = score_adr(edge, all_low);
  CHECK(adr0 == 0.0);
  CHECK(c0.fp == 10);

  std::vector<VictimSample> none_low;
  for (int i = 0; i < 10; ++i) none_low.push_back(victim_at(0.9, PriorityLabel::High));
  const auto [c1, adr1] = score_adr(edge, none_low);
  CHECK(adr1 == 1.0);
  CHECK(c1.tn == 10);
}

TEST_CASE("score_adr hand-counted fixture: 26 of 200 detected") {
  const BandEdge edge(0.5, 2.0);
  std::vector<VictimSample> attacked;
  for (int i = 0; i < 200; ++i) {
    // the first 26 stay above the detection band, the rest collapse to Low
    attacked.push_back(victim_at(i < 26 ? 1.0 : 0.0,
                                 i % 2 == 0 ? PriorityLabel::High
                                            : PriorityLabel::Medium));
  }
  const auto [counts, adr] = score_adr(edge, attacked);
  CHECK(counts.tn == 26);
  CHECK(counts.fp == 174);
  CHECK(adr == doctest::Approx(0.13).epsilon(1e-12));
}

TEST_CASE("score_adr validates its victims") {
  const BandEdge edge(0.3, 0.7);
  CHECK_THROWS_AS(score_adr(edge, {}), Error);

  std::vector<VictimSample> with_low = {victim_at(0.9, PriorityLabel::Low)};
  try {
    score_adr(edge, with_low);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidArgument);
  }
}

TEST_CASE("score_eir identities") {
  CHECK(score_eir(0.5, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(score_eir(0.0, 0.9) == doctest::Approx(1.0).epsilon(1e-15));

  // the published white-box arithmetic: ADR 3.4% against TNR 0.97
  const double eir = score_eir(0.034, 0.97);
  CHECK(std::abs(eir - (1.0 - 0.034 / 0.97)) < 1e-12);
  CHECK(eir == doctest::Approx(0.96495).epsilon(1e-4));

  // the attack may also help the classifier; EIR goes negative, reported as-is
  CHECK(score_eir(0.99, 0.9) < 0.0);

  try {
    score_eir(0.5, 0.0);
    FAIL("expected ZeroOriginalTnr");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroOriginalTnr);
  }
}

TEST_CASE("default grid has nine cells, case A once") {
  const auto cells = default_grid_cells();
  CHECK(cells.size() == 9);
  std::size_t a_count = 0;
  for (const auto& cell : cells) {
    if (cell.case_id == CaseId::A) ++a_count;
  }
  CHECK(a_count == 1);
}

TEST_CASE("run_cell: one seed gives zero stddev and consistent counts") {
  const SmallBench bench(501);
  const std::uint64_t seeds[] = {11};
  const CellResult result = run_cell({CaseId::B, true}, seeds, bench.cells);

  CHECK(result.report.seeds_aggregated == 1);
  CHECK(result.report.adr_stddev == 0.0);
  CHECK(result.report.eir_stddev == 0.0);
  CHECK(result.report.counts.tn + result.report.counts.fp == 40);  // 2 x 20 victims
  CHECK(result.report.adr >= 0.0);
  CHECK(result.report.adr <= 1.0);
  CHECK(result.report.eir <= 1.0);
  CHECK(result.combined_counts[0] == 240);  // 80% of 300
  CHECK(result.combined_counts[1] == 60);
}

TEST_CASE("run_cell: identical seed lists give identical reports") {
  const SmallBench bench(503);
  const std::uint64_t seeds[] = {3, 4};
  const CellResult a = run_cell({CaseId::D, true}, seeds, bench.cells);
  const CellResult b = run_cell({CaseId::D, true}, seeds, bench.cells);
  CHECK(a.report.adr == b.report.adr);
  CHECK(a.report.eir == b.report.eir);
  CHECK(a.report.per_seed_adr == b.report.per_seed_adr);
  CHECK(a.report.per_seed_eir == b.report.per_seed_eir);
  CHECK(a.report.surrogate_kind == b.report.surrogate_kind);
}

TEST_CASE("run_experiment: nine cells, report files, exact CSV round-trip") {
  const SmallBench bench(509);
  const auto dir = test::scratch_dir("experiment");

  ExperimentSpec spec;
  spec.seeds = {21, 22};
  spec.output_dir = dir;
  spec.jobs = 2;
  const ExperimentGrid grid = run_experiment(spec, bench.cells);
  CHECK(grid.cells.size() == 9);

  for (const char* name :
       {"surrogate_table.csv", "surrogate_table.txt", "adr_eir_with_cgan.csv",
        "adr_eir_with_cgan.txt", "adr_eir_without_cgan.csv",
        "adr_eir_without_cgan.txt", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir / name));
  }

  // re-parsing the CSV reproduces the in-memory values exactly
  const CsvTable table = read_csv_file(dir / "adr_eir_with_cgan.csv");
  REQUIRE(table.header.size() == 6);
  std::size_t row_at = 0;
  for (const auto& cell : grid.cells) {
    if (!cell.spec.use_cgan) continue;
    REQUIRE(row_at + 1 < table.rows.size() + 1);
    double adr = 0.0, eir = 0.0, adr_std = 0.0;
    REQUIRE(parse_double(table.rows[row_at][3], adr));
    REQUIRE(parse_double(table.rows[row_at][4], adr_std));
    REQUIRE(parse_double(table.rows[row_at + 1][3], eir));
    CHECK(adr == cell.report.adr);  // bitwise: shortest round-trip formatting
    CHECK(adr_std == cell.report.adr_stddev);
    CHECK(eir == cell.report.eir);
    CHECK(table.rows[row_at][0] == std::string(to_string(cell.spec.case_id)));
    row_at += 2;
  }

  // a second run is byte-identical
  const auto dir2 = test::scratch_dir("experiment2");
  ExperimentSpec spec2 = spec;
  spec2.output_dir = dir2;
  spec2.jobs = 1;  // worker count must not affect the bytes
  run_experiment(spec2, bench.cells);
  for (const char* name :
       {"surrogate_table.csv", "adr_eir_with_cgan.csv", "adr_eir_without_cgan.csv",
        "manifest.json"}) {
    CHECK(read_text_file(dir / name) == read_text_file(dir2 / name));
  }

  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("experiment seeds are shared across cells via the manifest") {
  const SmallBench bench(521);
  const auto dir = test::scratch_dir("manifest");
  ExperimentSpec spec;
  spec.seeds = {31, 32, 33};
  spec.output_dir = dir;
  const ExperimentGrid grid = run_experiment(spec, bench.cells);

  const std::string manifest = read_text_file(dir / "manifest.json");
  CHECK(manifest.find("\"seeds\"") != std::string::npos);
  for (const auto& cell : grid.cells) {
    CHECK(cell.report.seeds_aggregated == 3);
  }
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
