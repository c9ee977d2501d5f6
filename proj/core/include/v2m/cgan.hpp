#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include "v2m/nn.hpp"
#include "v2m/types.hpp"

namespace v2m {

/// Conditional GAN configuration. The generator is
/// [latent+embed -> gen_layers... -> feature_dim] with batch-norm + ReLU
/// hidden blocks and a tanh output; the discriminator is
/// [feature+embed -> disc_layers... -> 1] with leaky-ReLU hidden layers and a
/// sigmoid output.
struct CganConfig {
  std::size_t latent_dim = 64;
  std::size_t embed_dim = 16;
  std::vector<std::size_t> gen_layers = {64, 64};
  std::vector<std::size_t> disc_layers = {64, 64};
  std::size_t epochs = 2000;
  std::size_t batch_size = 64;  // half real, half generated per disc batch
  double learning_rate = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double leaky_slope = 0.2;
  // Convergence heuristic: stop once discriminator accuracy stays inside the
  // band for this many consecutive epochs.
  double acc_band_low = 0.45;
  double acc_band_high = 0.55;
  std::size_t acc_band_patience = 20;
  std::uint64_t seed = 0;

  /// Throws Errc::InvalidConfig on out-of-range values.
  void validate() const;
};

struct Generator {
  std::vector<nn::Dense> hidden;
  std::vector<nn::BatchNorm> norms;  // parallel to hidden
  nn::Dense out;
};

struct Discriminator {
  std::vector<nn::Dense> hidden;
  nn::Dense out;  // single logit; score is sigmoid(logit)
  double leaky_slope = 0.2;
};

/// Per-feature affine map between raw units and [-1, 1].
struct MinMaxScaler {
  std::vector<double> lo, hi;

  bool fitted() const { return !lo.empty(); }
  std::vector<double> scale(std::span<const double> raw) const;
  std::vector<double> unscale(std::span<const double> scaled) const;
};

struct CganModel {
  CganConfig config;
  std::size_t feature_dim = 0;
  Generator gen;
  Discriminator disc;
  Matrix label_embeddings;  // kNumClasses x embed_dim, frozen after init
  nn::Adam gen_opt, disc_opt;
  MinMaxScaler scaler;

  /// Number of trainable parameters (dense weights/biases and batch-norm
  /// gamma/beta; the frozen embedding table is excluded).
  std::size_t parameter_count() const;
};

struct TrainingTrace {
  struct EpochStats {
    double d_loss = 0.0;
    double g_loss = 0.0;
    double d_accuracy = 0.0;
  };
  std::vector<EpochStats> epochs;
};

/// Builds a model with He-uniform hidden layers, Xavier-uniform outputs,
/// unit-Gaussian label embeddings and zeroed Adam state. Deterministic for a
/// fixed config seed.
CganModel cgan_init(const CganConfig& config, std::size_t feature_dim);

/// Score-space losses: d_loss = -mean log(d_real) - mean log(1 - d_fake),
/// g_loss = -mean log(d_fake) (non-saturating). Scores must lie in (0,1);
/// otherwise Errc::ScoreOutOfRange.
std::pair<double, double> gan_loss(std::span<const double> d_real,
                                   std::span<const double> d_fake);

struct StepLosses {
  double d_loss = 0.0;
  double g_loss = 0.0;
  double d_accuracy = 0.0;
};

/// One discriminator update on a half-real/half-generated labeled batch, then
/// one generator update through the frozen discriminator. `real_scaled` holds
/// batch_size/2 rows already mapped to [-1,1]. Deterministic given the rng
/// stream. Errors: NonFiniteGradient on divergence.
StepLosses cgan_train_step(CganModel& model, const Matrix& real_scaled,
                           std::span<const PriorityLabel> labels, Rng& rng);

/// Full training loop with class-balanced batch sampling and the
/// accuracy-band early stop. Data must be labeled, nonempty, all Real.
TrainingTrace cgan_train(CganModel& model, const Dataset& data);

/// Draws n observations of the requested label from the frozen generator
/// (inference-mode batch norm), de-scaled to raw units and clipped to valid
/// ranges. Provenance is Generated.
Dataset cgan_sample(const CganModel& model, PriorityLabel label, std::size_t n,
                    Rng& rng);

std::string serialize_cgan(const CganModel& model);
CganModel deserialize_cgan(const std::string& text);
void write_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path);

// --- internals shared with the tests -------------------------------------

/// G forward on latent rows + labels; returns tanh output in [-1,1].
Matrix generator_forward_scaled(CganModel& model, const Matrix& z,
                                std::span<const PriorityLabel> labels,
                                bool training);

/// Discriminator loss over an explicit real/fake pair of scaled batches.
/// When `flat_grads` is non-null it receives d(loss)/d(disc params) in
/// flat-parameter order. Optional score outputs for accuracy bookkeeping.
double disc_loss_for_batch(const CganModel& model, const Matrix& x_real,
                           std::span<const PriorityLabel> real_labels,
                           const Matrix& x_fake,
                           std::span<const PriorityLabel> fake_labels,
                           std::vector<double>* flat_grads,
                           std::vector<double>* scores_real = nullptr,
                           std::vector<double>* scores_fake = nullptr);

/// Generator loss through the frozen discriminator for explicit latents.
/// When `flat_grads` is non-null it receives d(loss)/d(gen params).
double gen_loss_for_batch(CganModel& model, const Matrix& z,
                          std::span<const PriorityLabel> labels,
                          std::vector<double>* flat_grads);

std::vector<double> gen_flat_params(const CganModel& model);
void set_gen_flat_params(CganModel& model, std::span<const double> params);
std::vector<double> disc_flat_params(const CganModel& model);
void set_disc_flat_params(CganModel& model, std::span<const double> params);

}  // namespace v2m
