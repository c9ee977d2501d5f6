#include <doctest.h>

#include <cmath>

#include "v2m/cgan.hpp"
#include "v2m/errors.hpp"
#include "test_util.hpp"

using namespace v2m;

namespace {

/// Miniature network for the finite-difference checks.
CganConfig mini_config(std::uint64_t seed) {
  CganConfig config;
  config.latent_dim = 2;
  config.embed_dim = 2;
  config.gen_layers = {2, 2};
  config.disc_layers = {2, 2};
  config.batch_size = 4;
  config.seed = seed;
  return config;
}

struct MiniBatches {
  Matrix real{4, 2};
  Matrix fake{4, 2};
  Matrix z{4, 2};
  std::vector<PriorityLabel> labels{PriorityLabel::High, PriorityLabel::Medium,
                                    PriorityLabel::Low, PriorityLabel::High};
};

MiniBatches mini_batches(std::uint64_t seed) {
  MiniBatches b;
  Rng rng(seed);
  for (double& v : b.real.data) v = rng.uniform(-0.9, 0.9);
  for (double& v : b.fake.data) v = rng.uniform(-0.9, 0.9);
  for (double& v : b.z.data) v = rng.normal();
  return b;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1e-6, std::abs(a) + std::abs(b));
}

}  // namespace

TEST_SUITE("cgan") {

TEST_CASE("loss identities at the equilibrium score") {
  const std::vector<double> half(8, 0.5);
  const auto [d_loss, g_loss] = gan_loss(half, half);
  CHECK(std::abs(d_loss - 2.0 * std::log(2.0)) < 1e-12);
  CHECK(std::abs(g_loss - std::log(2.0)) < 1e-12);
}

TEST_CASE("perfect discriminator drives d_loss to zero") {
  const std::vector<double> real(8, 1.0 - 1e-12);
  const std::vector<double> fake(8, 1e-12);
  const auto [d_loss, g_loss] = gan_loss(real, fake);
  CHECK(d_loss < 1e-9);
  CHECK(g_loss > 20.0);  // saturated generator objective
}

TEST_CASE("gan_loss matches an elementwise scalar recomputation") {
  Rng rng(3001);
  std::vector<double> real(16), fake(16);
  for (double& v : real) v = rng.uniform(0.05, 0.95);
  for (double& v : fake) v = rng.uniform(0.05, 0.95);
  const auto [d_loss, g_loss] = gan_loss(real, fake);

  double d_expect = 0.0, g_expect = 0.0;
  for (double s : real) d_expect += -std::log(s) / 16.0;
  for (double s : fake) d_expect += -std::log(1.0 - s) / 16.0;
  for (double s : fake) g_expect += -std::log(s) / 16.0;
  CHECK(d_loss == doctest::Approx(d_expect).epsilon(1e-12));
  CHECK(g_loss == doctest::Approx(g_expect).epsilon(1e-12));
}

TEST_CASE("scores outside (0,1) are rejected") {
  const std::vector<double> ok(4, 0.5);
  const std::vector<double> zero(4, 0.0);
  const std::vector<double> one(4, 1.0);
  for (const auto& bad : {zero, one}) {
    try {
      gan_loss(bad, ok);
      FAIL("expected ScoreOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ScoreOutOfRange);
    }
  }
}

TEST_CASE("init is deterministic and validates the config") {
  const CganConfig config = test::tiny_cgan_config(5);
  const CganModel a = cgan_init(config, kFeatureDim);
  const CganModel b = cgan_init(config, kFeatureDim);
  CHECK(gen_flat_params(a) == gen_flat_params(b));
  CHECK(disc_flat_params(a) == disc_flat_params(b));
  CHECK(a.label_embeddings.data == b.label_embeddings.data);

  CganConfig bad = config;
  bad.latent_dim = 0;
  try {
    cgan_init(bad, kFeatureDim);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
  }
}

TEST_CASE("parameter count equals the architecture arithmetic") {
  CganConfig config;  // defaults: 64/16, hidden 64-64
  config.seed = 1;
  const CganModel model = cgan_init(config, kFeatureDim);

  std::size_t expected = 0;
  std::size_t in = config.latent_dim + config.embed_dim;
  for (std::size_t width : config.gen_layers) {
    expected += width * in + width;  // dense
    expected += 2 * width;           // batch-norm gamma/beta
    in = width;
  }
  expected += kFeatureDim * in + kFeatureDim;

  in = kFeatureDim + config.embed_dim;
  for (std::size_t width : config.disc_layers) {
    expected += width * in + width;
    in = width;
  }
  expected += in + 1;

  CHECK(model.parameter_count() == expected);
  CHECK(gen_flat_params(model).size() + disc_flat_params(model).size() == expected);
}

TEST_CASE("discriminator gradients match central finite differences") {
  CganModel model = cgan_init(mini_config(11), 2);
  const MiniBatches batches = mini_batches(12);

  std::vector<double> analytic;
  disc_loss_for_batch(model, batches.real, batches.labels, batches.fake,
                      batches.labels, &analytic);

  std::vector<double> params = disc_flat_params(model);
  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    CganModel up = model, down = model;
    std::vector<double> bumped = params;
    bumped[p] = params[p] + h;
    set_disc_flat_params(up, bumped);
    bumped[p] = params[p] - h;
    set_disc_flat_params(down, bumped);
    const double loss_up = disc_loss_for_batch(up, batches.real, batches.labels,
                                               batches.fake, batches.labels, nullptr);
    const double loss_down = disc_loss_for_batch(
        down, batches.real, batches.labels, batches.fake, batches.labels, nullptr);
    const double fd = (loss_up - loss_down) / (2.0 * h);
    max_rel = std::max(max_rel, rel_err(analytic[p], fd));
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("generator gradients match central finite differences through the frozen disc") {
  CganModel model = cgan_init(mini_config(13), 2);
  const MiniBatches batches = mini_batches(14);

  std::vector<double> analytic;
  gen_loss_for_batch(model, batches.z, batches.labels, &analytic);

  const std::vector<double> params = gen_flat_params(model);
  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    CganModel up = model, down = model;
    std::vector<double> bumped = params;
    bumped[p] = params[p] + h;
    set_gen_flat_params(up, bumped);
    bumped[p] = params[p] - h;
    set_gen_flat_params(down, bumped);
    const double loss_up = gen_loss_for_batch(up, batches.z, batches.labels, nullptr);
    const double loss_down =
        gen_loss_for_batch(down, batches.z, batches.labels, nullptr);
    const double fd = (loss_up - loss_down) / (2.0 * h);
    max_rel = std::max(max_rel, rel_err(analytic[p], fd));
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  CganConfig config = test::tiny_cgan_config(17);
  config.learning_rate = 1e-30;  // validated positive; effectively zero
  CganModel model = cgan_init(config, kFeatureDim);
  const auto gen_before = gen_flat_params(model);
  const auto disc_before = disc_flat_params(model);

  Matrix real(config.batch_size / 2, kFeatureDim);
  Rng rng(18);
  for (double& v : real.data) v = rng.uniform(-1.0, 1.0);
  std::vector<PriorityLabel> labels(config.batch_size / 2, PriorityLabel::High);
  cgan_train_step(model, real, labels, rng);

  const auto gen_after = gen_flat_params(model);
  const auto disc_after = disc_flat_params(model);
  for (std::size_t i = 0; i < gen_before.size(); ++i) {
    CHECK(std::abs(gen_after[i] - gen_before[i]) < 1e-20);
  }
  for (std::size_t i = 0; i < disc_before.size(); ++i) {
    CHECK(std::abs(disc_after[i] - disc_before[i]) < 1e-20);
  }
}

TEST_CASE("train step is deterministic for fixed seeds") {
  const CganConfig config = test::tiny_cgan_config(19);
  Matrix real(config.batch_size / 2, kFeatureDim);
  Rng fill(20);
  for (double& v : real.data) v = fill.uniform(-1.0, 1.0);
  std::vector<PriorityLabel> labels(config.batch_size / 2, PriorityLabel::Medium);

  CganModel a = cgan_init(config, kFeatureDim);
  CganModel b = cgan_init(config, kFeatureDim);
  Rng rng_a(21), rng_b(21);
  const StepLosses la = cgan_train_step(a, real, labels, rng_a);
  const StepLosses lb = cgan_train_step(b, real, labels, rng_b);
  CHECK(la.d_loss == lb.d_loss);
  CHECK(la.g_loss == lb.g_loss);
  CHECK(gen_flat_params(a) == gen_flat_params(b));
  CHECK(disc_flat_params(a) == disc_flat_params(b));
}

TEST_CASE("divergence raises NonFiniteGradient") {
  CganModel model = cgan_init(mini_config(23), 2);
  auto params = disc_flat_params(model);
  params[0] = std::numeric_limits<double>::quiet_NaN();  // diverged state
  set_disc_flat_params(model, params);

  Matrix real(2, 2);
  real(0, 0) = 0.5;
  real(1, 1) = -0.5;
  std::vector<PriorityLabel> labels(2, PriorityLabel::High);
  Rng rng(24);
  try {
    cgan_train_step(model, real, labels, rng);
    FAIL("expected NonFiniteGradient");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteGradient);
  }
}

TEST_CASE("cgan_train contract: zero epochs, trace length, provenance") {
  const Dataset data = test::labeled_benchmark(200, 211);

  CganConfig config = test::tiny_cgan_config(25, 0);
  CganModel model = cgan_init(config, kFeatureDim);
  const auto before = gen_flat_params(model);
  const TrainingTrace trace = cgan_train(model, data);
  CHECK(trace.epochs.empty());
  CHECK(gen_flat_params(model) == before);

  CganConfig short_config = test::tiny_cgan_config(26, 5);
  CganModel short_model = cgan_init(short_config, kFeatureDim);
  const TrainingTrace short_trace = cgan_train(short_model, data);
  CHECK(short_trace.epochs.size() <= 5);
  for (const auto& epoch : short_trace.epochs) {
    CHECK(std::isfinite(epoch.d_loss));
    CHECK(std::isfinite(epoch.g_loss));
  }

  Dataset generated = data;
  generated.provenance[0] = Provenance::Generated;
  CganModel reject = cgan_init(short_config, kFeatureDim);
  CHECK_THROWS_AS(cgan_train(reject, generated), Error);
}

TEST_CASE("training on an easy mixture lands near the equilibrium accuracy") {
  // two tight modes per class; recorded band from fixed-seed pilot runs
  const Dataset data = test::labeled_benchmark(400, 227);
  CganConfig config;
  config.latent_dim = 16;
  config.embed_dim = 8;
  config.gen_layers = {32, 32};
  config.disc_layers = {32, 32};
  config.epochs = 120;
  config.batch_size = 32;
  config.seed = 227;
  CganModel model = cgan_init(config, kFeatureDim);
  const TrainingTrace trace = cgan_train(model, data);
  REQUIRE(!trace.epochs.empty());
  const double final_acc = trace.epochs.back().d_accuracy;
  CHECK(final_acc >= 0.35);
  CHECK(final_acc <= 0.65);
}

TEST_CASE("scaler round-trips within 1e-9") {
  MinMaxScaler scaler;
  scaler.lo = {0.0, -3.0, 10.0, 1.0, 0.0, 0.0};
  scaler.hi = {5.0, 3.0, 90.0, 1.0, 1.0, 23.0};  // one degenerate feature
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> raw(6);
    for (std::size_t j = 0; j < 6; ++j) {
      raw[j] = rng.uniform(scaler.lo[j], scaler.hi[j]);
    }
    raw[3] = 1.0;  // degenerate feature maps to its single value
    const auto back = scaler.unscale(scaler.scale(raw));
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(std::abs(back[j] - raw[j]) < 1e-9 * std::max(1.0, std::abs(raw[j])));
    }
  }
}

TEST_CASE("sampling is conditioned, deterministic and respects invariants") {
  const Dataset data = test::labeled_benchmark(200, 233);
  CganConfig config = test::tiny_cgan_config(31, 10);
  CganModel model = cgan_init(config, kFeatureDim);
  cgan_train(model, data);

  for (PriorityLabel label : kAllLabels) {
    Rng rng(35);
    const Dataset sample = cgan_sample(model, label, 1, rng);
    REQUIRE(sample.size() == 1);
    sample.observations[0].validate();
    CHECK(*sample.labels[0] == label);
    CHECK(sample.provenance[0] == Provenance::Generated);

    Rng rng2(35);
    const Dataset again = cgan_sample(model, label, 1, rng2);
    CHECK(again.observations[0].features() == sample.observations[0].features());
  }
}

TEST_CASE("converged sampling tracks the real per-class moments") {
  const Dataset data = test::labeled_benchmark(600, 241);
  CganConfig config;
  config.latent_dim = 16;
  config.embed_dim = 8;
  config.gen_layers = {32, 32};
  config.disc_layers = {32, 32};
  config.epochs = 150;
  config.batch_size = 32;
  config.seed = 241;
  CganModel model = cgan_init(config, kFeatureDim);
  cgan_train(model, data);

  // real per-class means in standardized units
  const Normalizer& norm = *data.norm;
  for (PriorityLabel label : kAllLabels) {
    std::array<double, kFeatureDim> real_mean{};
    std::size_t count = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (*data.labels[i] != label) continue;
      const auto row = data.standardized_row(i);
      for (std::size_t j = 0; j < kFeatureDim; ++j) real_mean[j] += row[j];
      ++count;
    }
    for (double& v : real_mean) v /= static_cast<double>(count);

    Rng rng(57);
    const Dataset sample = cgan_sample(model, label, 800, rng);
    std::array<double, kFeatureDim> gen_mean{};
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const auto feats = sample.observations[i].features();
      const auto row = norm.standardize(feats);
      for (std::size_t j = 0; j < kFeatureDim; ++j) gen_mean[j] += row[j];
    }
    for (double& v : gen_mean) v /= 800.0;

    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      CHECK(std::abs(gen_mean[j] - real_mean[j]) < 0.5);  // standardized units
    }
  }
}

TEST_CASE("checkpoint round-trips byte for byte") {
  const Dataset data = test::labeled_benchmark(200, 239);
  CganConfig config = test::tiny_cgan_config(37, 5);
  CganModel model = cgan_init(config, kFeatureDim);
  cgan_train(model, data);

  const std::string text = serialize_cgan(model);
  CganModel loaded = deserialize_cgan(text);
  CHECK(serialize_cgan(loaded) == text);

  Rng rng_a(41), rng_b(41);
  const Dataset sample_a = cgan_sample(model, PriorityLabel::Low, 3, rng_a);
  const Dataset sample_b = cgan_sample(loaded, PriorityLabel::Low, 3, rng_b);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(sample_a.observations[i].features() == sample_b.observations[i].features());
  }
}

}  // TEST_SUITE
