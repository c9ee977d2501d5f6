#include "v2m/config.hpp"

#include <nlohmann/json.hpp>

#include "v2m/csv.hpp"
#include "v2m/errors.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "config";

using nlohmann::json;

}  // namespace

void RunConfig::validate() const {
  if (dataset.source != "synthetic" && dataset.source != "csv") {
    fail(Errc::InvalidConfig, kModule, "dataset.source must be 'synthetic' or 'csv'");
  }
  if (dataset.source == "csv" && dataset.csv_path.empty()) {
    fail(Errc::InvalidConfig, kModule, "dataset.csv_path required for csv source");
  }
  if (dataset.total_size < 50) {
    fail(Errc::InvalidConfig, kModule, "dataset.total_size must be >= 50");
  }
  if (dataset.kmeans_restarts < 1) {
    fail(Errc::InvalidConfig, kModule, "dataset.kmeans_restarts must be >= 1");
  }
  if (dataset.victims_per_class < 1) {
    fail(Errc::InvalidConfig, kModule, "dataset.victims_per_class must be >= 1");
  }
  dataset.profile.validate();
  if (edge.knn_k < 1) {
    fail(Errc::InvalidConfig, kModule, "edge.knn_k must be >= 1");
  }
  if (!(edge.holdout_train_frac > 0.0 && edge.holdout_train_frac < 1.0)) {
    fail(Errc::InvalidConfig, kModule, "edge.holdout_train_frac must be in (0,1)");
  }
  for (ModelKind kind : kAllModelKinds) models.validate(kind);
  cgan.validate();
  attack.validate();
  if (grid.n_seeds < 1) {
    fail(Errc::InvalidConfig, kModule, "grid.n_seeds must be >= 1");
  }
  if (output_dir.empty()) {
    fail(Errc::InvalidConfig, kModule, "output_dir must be set");
  }
}

RunConfig default_run_config() {
  RunConfig config;
  // grid-scale CGAN budget; the accuracy-band early stop usually fires first
  config.cgan.epochs = 200;
  return config;
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["dataset"] = json{{"source", c.dataset.source},
                      {"csv_path", c.dataset.csv_path},
                      {"total_size", c.dataset.total_size},
                      {"kmeans_restarts", c.dataset.kmeans_restarts},
                      {"victims_per_class", c.dataset.victims_per_class},
                      {"profile",
                       json{{"base_consumption_kw", c.dataset.profile.base_consumption_kw},
                            {"consumption_peak_kw", c.dataset.profile.consumption_peak_kw},
                            {"consumption_noise_kw", c.dataset.profile.consumption_noise_kw},
                            {"pv_capacity_kw", c.dataset.profile.pv_capacity_kw},
                            {"pv_noise_frac", c.dataset.profile.pv_noise_frac},
                            {"wind_mean_kw", c.dataset.profile.wind_mean_kw},
                            {"wind_gust_kw", c.dataset.profile.wind_gust_kw},
                            {"battery_capacity_min_kwh",
                             c.dataset.profile.battery_capacity_min_kwh},
                            {"battery_capacity_max_kwh",
                             c.dataset.profile.battery_capacity_max_kwh}}}};
  j["edge"] = json{{"knn_k", c.edge.knn_k},
                   {"compare_lr_svm", c.edge.compare_lr_svm},
                   {"holdout_train_frac", c.edge.holdout_train_frac}};
  j["models"] = json{
      {"knn", json{{"k", c.models.knn.k}}},
      {"tree", json{{"max_depth", c.models.tree.max_depth},
                    {"min_leaf", c.models.tree.min_leaf}}},
      {"forest", json{{"n_trees", c.models.forest.n_trees},
                      {"bootstrap", c.models.forest.bootstrap},
                      {"feature_bagging", c.models.forest.feature_bagging}}},
      {"logistic", json{{"learning_rate", c.models.logistic.learning_rate},
                        {"epochs", c.models.logistic.epochs},
                        {"l2", c.models.logistic.l2}}},
      {"svm", json{{"c", c.models.svm.c},
                   {"learning_rate", c.models.svm.learning_rate},
                   {"epochs", c.models.svm.epochs}}},
      {"bayes", json{{"variance_floor", c.models.bayes.variance_floor}}}};
  j["cgan"] = json{{"latent_dim", c.cgan.latent_dim},
                   {"embed_dim", c.cgan.embed_dim},
                   {"gen_layers", c.cgan.gen_layers},
                   {"disc_layers", c.cgan.disc_layers},
                   {"epochs", c.cgan.epochs},
                   {"batch_size", c.cgan.batch_size},
                   {"learning_rate", c.cgan.learning_rate},
                   {"adam_beta1", c.cgan.adam_beta1},
                   {"adam_beta2", c.cgan.adam_beta2},
                   {"leaky_slope", c.cgan.leaky_slope},
                   {"acc_band_low", c.cgan.acc_band_low},
                   {"acc_band_high", c.cgan.acc_band_high},
                   {"acc_band_patience", c.cgan.acc_band_patience}};
  j["attack"] = json{{"step_size", c.attack.step_size},
                     {"max_steps", c.attack.max_steps},
                     {"neighbor_count", c.attack.neighbor_count}};
  j["grid"] = json{{"n_seeds", c.grid.n_seeds}};
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["jobs"] = c.jobs;
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::InvalidConfig, kModule, std::string("bad config: ") + e.what());
  }
  RunConfig c = default_run_config();
  try {
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      c.dataset.source = d.value("source", c.dataset.source);
      c.dataset.csv_path = d.value("csv_path", c.dataset.csv_path);
      c.dataset.total_size = d.value("total_size", c.dataset.total_size);
      c.dataset.kmeans_restarts = d.value("kmeans_restarts", c.dataset.kmeans_restarts);
      c.dataset.victims_per_class =
          d.value("victims_per_class", c.dataset.victims_per_class);
      if (d.contains("profile")) {
        const auto& p = d["profile"];
        auto& prof = c.dataset.profile;
        prof.base_consumption_kw = p.value("base_consumption_kw", prof.base_consumption_kw);
        prof.consumption_peak_kw = p.value("consumption_peak_kw", prof.consumption_peak_kw);
        prof.consumption_noise_kw =
            p.value("consumption_noise_kw", prof.consumption_noise_kw);
        prof.pv_capacity_kw = p.value("pv_capacity_kw", prof.pv_capacity_kw);
        prof.pv_noise_frac = p.value("pv_noise_frac", prof.pv_noise_frac);
        prof.wind_mean_kw = p.value("wind_mean_kw", prof.wind_mean_kw);
        prof.wind_gust_kw = p.value("wind_gust_kw", prof.wind_gust_kw);
        prof.battery_capacity_min_kwh =
            p.value("battery_capacity_min_kwh", prof.battery_capacity_min_kwh);
        prof.battery_capacity_max_kwh =
            p.value("battery_capacity_max_kwh", prof.battery_capacity_max_kwh);
      }
    }
    if (j.contains("edge")) {
      const auto& e = j["edge"];
      c.edge.knn_k = e.value("knn_k", c.edge.knn_k);
      c.edge.compare_lr_svm = e.value("compare_lr_svm", c.edge.compare_lr_svm);
      c.edge.holdout_train_frac =
          e.value("holdout_train_frac", c.edge.holdout_train_frac);
    }
    if (j.contains("models")) {
      const auto& m = j["models"];
      if (m.contains("knn")) c.models.knn.k = m["knn"].value("k", c.models.knn.k);
      if (m.contains("tree")) {
        c.models.tree.max_depth = m["tree"].value("max_depth", c.models.tree.max_depth);
        c.models.tree.min_leaf = m["tree"].value("min_leaf", c.models.tree.min_leaf);
      }
      if (m.contains("forest")) {
        c.models.forest.n_trees = m["forest"].value("n_trees", c.models.forest.n_trees);
        c.models.forest.bootstrap =
            m["forest"].value("bootstrap", c.models.forest.bootstrap);
        c.models.forest.feature_bagging =
            m["forest"].value("feature_bagging", c.models.forest.feature_bagging);
      }
      if (m.contains("logistic")) {
        c.models.logistic.learning_rate =
            m["logistic"].value("learning_rate", c.models.logistic.learning_rate);
        c.models.logistic.epochs = m["logistic"].value("epochs", c.models.logistic.epochs);
        c.models.logistic.l2 = m["logistic"].value("l2", c.models.logistic.l2);
      }
      if (m.contains("svm")) {
        c.models.svm.c = m["svm"].value("c", c.models.svm.c);
        c.models.svm.learning_rate =
            m["svm"].value("learning_rate", c.models.svm.learning_rate);
        c.models.svm.epochs = m["svm"].value("epochs", c.models.svm.epochs);
      }
      if (m.contains("bayes")) {
        c.models.bayes.variance_floor =
            m["bayes"].value("variance_floor", c.models.bayes.variance_floor);
      }
    }
    if (j.contains("cgan")) {
      const auto& g = j["cgan"];
      c.cgan.latent_dim = g.value("latent_dim", c.cgan.latent_dim);
      c.cgan.embed_dim = g.value("embed_dim", c.cgan.embed_dim);
      c.cgan.gen_layers = g.value("gen_layers", c.cgan.gen_layers);
      c.cgan.disc_layers = g.value("disc_layers", c.cgan.disc_layers);
      c.cgan.epochs = g.value("epochs", c.cgan.epochs);
      c.cgan.batch_size = g.value("batch_size", c.cgan.batch_size);
      c.cgan.learning_rate = g.value("learning_rate", c.cgan.learning_rate);
      c.cgan.adam_beta1 = g.value("adam_beta1", c.cgan.adam_beta1);
      c.cgan.adam_beta2 = g.value("adam_beta2", c.cgan.adam_beta2);
      c.cgan.leaky_slope = g.value("leaky_slope", c.cgan.leaky_slope);
      c.cgan.acc_band_low = g.value("acc_band_low", c.cgan.acc_band_low);
      c.cgan.acc_band_high = g.value("acc_band_high", c.cgan.acc_band_high);
      c.cgan.acc_band_patience = g.value("acc_band_patience", c.cgan.acc_band_patience);
    }
    if (j.contains("attack")) {
      const auto& a = j["attack"];
      c.attack.step_size = a.value("step_size", c.attack.step_size);
      c.attack.max_steps = a.value("max_steps", c.attack.max_steps);
      c.attack.neighbor_count = a.value("neighbor_count", c.attack.neighbor_count);
    }
    if (j.contains("grid")) {
      c.grid.n_seeds = j["grid"].value("n_seeds", c.grid.n_seeds);
    }
    c.master_seed = j.value("master_seed", c.master_seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    fail(Errc::InvalidConfig, kModule, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_text_file(path));
}

}  // namespace v2m
