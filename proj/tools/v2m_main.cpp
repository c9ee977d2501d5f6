// v2m: simulate inference + evasion attacks against a microgrid
// priority classifier and score their impact.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "v2m/commands.hpp"
#include "v2m/errors.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
  bool has_seed = false;
  std::uint64_t seed = 0;
  bool has_jobs = false;
  std::size_t jobs = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Path to a JSON run config");
  cmd->add_option("--output-dir", opts.output_dir, "Override config output_dir");
  cmd->add_option("--seed", opts.seed, "Override config master_seed")
      ->each([&opts](const std::string&) { opts.has_seed = true; });
  cmd->add_option("--jobs", opts.jobs, "Worker count for the experiment grid")
      ->each([&opts](const std::string&) { opts.has_jobs = true; });
}

v2m::RunConfig resolve_config(const CommonOptions& opts) {
  v2m::RunConfig config = opts.config_path.empty()
                              ? v2m::default_run_config()
                              : v2m::load_run_config(opts.config_path);
  if (!opts.output_dir.empty()) config.output_dir = opts.output_dir;
  if (opts.has_seed) config.master_seed = opts.seed;
  if (opts.has_jobs) config.jobs = opts.jobs;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial attack simulation for V2M energy-request classification"};
  app.require_subcommand(1);

  CommonOptions gen_opts, edge_opts, attack_opts, experiment_opts;
  std::string attack_case = "A";
  bool no_cgan = false;
  std::size_t experiment_seeds = 0;

  CLI::App* gen = app.add_subcommand("gen-data", "Generate the labeled benchmark dataset");
  add_common(gen, gen_opts);

  CLI::App* edge = app.add_subcommand("train-edge", "Train and persist the edge classifier");
  add_common(edge, edge_opts);

  CLI::App* attack = app.add_subcommand("attack", "Run one attack case end to end");
  add_common(attack, attack_opts);
  attack->add_option("--case", attack_case, "Case id: A, B, C, D or E")->required();
  attack->add_flag("--no-cgan", no_cgan, "Skip CGAN augmentation (cases B-E)");

  CLI::App* experiment =
      app.add_subcommand("experiment", "Run the full case grid and emit reports");
  add_common(experiment, experiment_opts);
  experiment->add_option("--seeds", experiment_seeds, "Override grid.n_seeds");

  CLI::App* print_config = app.add_subcommand(
      "print-default-config", "Write the default JSON config to stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      v2m::cmd_gen_data(resolve_config(gen_opts));
    } else if (edge->parsed()) {
      v2m::cmd_train_edge(resolve_config(edge_opts));
    } else if (attack->parsed()) {
      const auto case_id = v2m::case_from_string(attack_case);
      if (!case_id) {
        std::cerr << "cli: unknown case '" << attack_case << "'\n";
        return 1;
      }
      v2m::cmd_attack(resolve_config(attack_opts), *case_id, !no_cgan);
    } else if (experiment->parsed()) {
      v2m::RunConfig config = resolve_config(experiment_opts);
      if (experiment_seeds > 0) config.grid.n_seeds = experiment_seeds;
      v2m::cmd_experiment(config, std::cout);
    } else if (print_config->parsed()) {
      std::cout << v2m::run_config_to_json(v2m::default_run_config());
    }
  } catch (const v2m::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cli: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
