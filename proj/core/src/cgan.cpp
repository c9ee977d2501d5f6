#include "v2m/cgan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "v2m/csv.hpp"
#include "v2m/errors.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "cgan";

using nlohmann::json;

// --- parameter visitation (fixed flattening order) ------------------------

template <typename Fn>
void visit_params(Generator& g, Fn&& fn) {
  for (std::size_t i = 0; i < g.hidden.size(); ++i) {
    fn(g.hidden[i].w.data);
    fn(g.hidden[i].b);
    fn(g.norms[i].gamma);
    fn(g.norms[i].beta);
  }
  fn(g.out.w.data);
  fn(g.out.b);
}

template <typename Fn>
void visit_params(const Generator& g, Fn&& fn) {
  for (std::size_t i = 0; i < g.hidden.size(); ++i) {
    fn(g.hidden[i].w.data);
    fn(g.hidden[i].b);
    fn(g.norms[i].gamma);
    fn(g.norms[i].beta);
  }
  fn(g.out.w.data);
  fn(g.out.b);
}

template <typename Fn>
void visit_params(Discriminator& d, Fn&& fn) {
  for (auto& layer : d.hidden) {
    fn(layer.w.data);
    fn(layer.b);
  }
  fn(d.out.w.data);
  fn(d.out.b);
}

template <typename Fn>
void visit_params(const Discriminator& d, Fn&& fn) {
  for (const auto& layer : d.hidden) {
    fn(layer.w.data);
    fn(layer.b);
  }
  fn(d.out.w.data);
  fn(d.out.b);
}

template <typename Net>
std::vector<double> flatten(const Net& net) {
  std::vector<double> out;
  visit_params(net, [&](const std::vector<double>& block) {
    out.insert(out.end(), block.begin(), block.end());
  });
  return out;
}

template <typename Net>
void unflatten(Net& net, std::span<const double> params) {
  std::size_t at = 0;
  visit_params(net, [&](std::vector<double>& block) {
    std::copy(params.begin() + at, params.begin() + at + block.size(),
              block.begin());
    at += block.size();
  });
}

Generator zero_like(const Generator& g) {
  Generator z = g;
  visit_params(z, [](std::vector<double>& block) {
    std::fill(block.begin(), block.end(), 0.0);
  });
  return z;
}

Discriminator zero_like(const Discriminator& d) {
  Discriminator z = d;
  visit_params(z, [](std::vector<double>& block) {
    std::fill(block.begin(), block.end(), 0.0);
  });
  return z;
}

// --- forward/backward ------------------------------------------------------

Matrix concat_labels(const Matrix& left, std::span<const PriorityLabel> labels,
                     const Matrix& embeddings) {
  Matrix out(left.rows, left.cols + embeddings.cols);
  for (std::size_t i = 0; i < left.rows; ++i) {
    const auto li = left.row(i);
    const auto emb = embeddings.row(static_cast<std::size_t>(labels[i]));
    auto oi = out.row(i);
    std::copy(li.begin(), li.end(), oi.begin());
    std::copy(emb.begin(), emb.end(), oi.begin() + left.cols);
  }
  return out;
}

struct GenCaches {
  std::vector<Matrix> h;        // h[0] = input, h[i+1] = relu output of block i
  std::vector<Matrix> pre_bn;   // dense outputs
  std::vector<nn::BnCache> bn;
  std::vector<Matrix> post_bn;  // pre-relu
  Matrix y;                     // tanh output
};

Matrix gen_forward(Generator& g, const Matrix& input, bool training,
                   GenCaches* caches) {
  Matrix h = input;
  if (caches != nullptr) {
    caches->h.clear();
    caches->pre_bn.clear();
    caches->bn.clear();
    caches->post_bn.clear();
    caches->h.push_back(h);
  }
  for (std::size_t i = 0; i < g.hidden.size(); ++i) {
    Matrix a = nn::dense_forward(g.hidden[i], h);
    Matrix normed;
    if (training) {
      nn::BnCache cache;
      normed = nn::bn_forward_train(g.norms[i], a, cache);
      if (caches != nullptr) caches->bn.push_back(std::move(cache));
    } else {
      normed = nn::bn_forward_eval(g.norms[i], a);
    }
    Matrix activated = nn::relu(normed);
    if (caches != nullptr) {
      caches->pre_bn.push_back(std::move(a));
      caches->post_bn.push_back(normed);
      caches->h.push_back(activated);
    }
    h = std::move(activated);
  }
  Matrix y = nn::tanh_forward(nn::dense_forward(g.out, h));
  if (caches != nullptr) caches->y = y;
  return y;
}

/// Backward through the generator given d(loss)/d(tanh output).
void gen_backward(const Generator& g, const GenCaches& caches, const Matrix& d_y,
                  Generator& grad) {
  Matrix d = nn::tanh_backward(caches.y, d_y);
  d = nn::dense_backward(g.out, caches.h.back(), d, grad.out);
  for (std::size_t i = g.hidden.size(); i-- > 0;) {
    d = nn::relu_backward(caches.post_bn[i], d);
    d = nn::bn_backward(g.norms[i], caches.bn[i], d, grad.norms[i]);
    d = nn::dense_backward(g.hidden[i], caches.h[i], d, grad.hidden[i]);
  }
}

struct DiscCaches {
  std::vector<Matrix> h;        // h[0] = input, h[i+1] = leaky output
  std::vector<Matrix> pre_act;  // dense outputs
};

std::vector<double> disc_forward(const Discriminator& d, const Matrix& input,
                                 DiscCaches* caches) {
  Matrix h = input;
  if (caches != nullptr) {
    caches->h.clear();
    caches->pre_act.clear();
    caches->h.push_back(h);
  }
  for (const auto& layer : d.hidden) {
    Matrix a = nn::dense_forward(layer, h);
    Matrix activated = nn::leaky_relu(a, d.leaky_slope);
    if (caches != nullptr) {
      caches->pre_act.push_back(std::move(a));
      caches->h.push_back(activated);
    }
    h = std::move(activated);
  }
  const Matrix logit_col = nn::dense_forward(d.out, h);
  std::vector<double> logits(logit_col.rows);
  for (std::size_t i = 0; i < logit_col.rows; ++i) logits[i] = logit_col(i, 0);
  return logits;
}

/// Backward through the discriminator given d(loss)/d(logit) per row. When
/// `grad` is null only the input gradient is produced (generator update path).
Matrix disc_backward(const Discriminator& d, const DiscCaches& caches,
                     const std::vector<double>& d_logits, Discriminator* grad) {
  Matrix d_out(d_logits.size(), 1);
  for (std::size_t i = 0; i < d_logits.size(); ++i) d_out(i, 0) = d_logits[i];

  Discriminator scratch = grad == nullptr ? zero_like(d) : Discriminator{};
  Discriminator& sink = grad == nullptr ? scratch : *grad;
  Matrix delta = nn::dense_backward(d.out, caches.h.back(), d_out, sink.out);
  for (std::size_t i = d.hidden.size(); i-- > 0;) {
    delta = nn::leaky_relu_backward(caches.pre_act[i], delta, d.leaky_slope);
    delta = nn::dense_backward(d.hidden[i], caches.h[i], delta, sink.hidden[i]);
  }
  return delta;
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Matrix draw_latent(std::size_t rows, std::size_t latent_dim, Rng& rng) {
  Matrix z(rows, latent_dim);
  for (double& v : z.data) v = rng.normal();
  return z;
}

json dense_to_json(const nn::Dense& d) {
  return json{{"out", d.w.rows}, {"in", d.w.cols}, {"w", d.w.data}, {"b", d.b}};
}

nn::Dense dense_from_json(const json& j) {
  nn::Dense d = nn::make_dense(j.at("in").get<std::size_t>(),
                               j.at("out").get<std::size_t>());
  d.w.data = j.at("w").get<std::vector<double>>();
  d.b = j.at("b").get<std::vector<double>>();
  return d;
}

json bn_to_json(const nn::BatchNorm& bn) {
  return json{{"gamma", bn.gamma},
              {"beta", bn.beta},
              {"running_mean", bn.running_mean},
              {"running_var", bn.running_var},
              {"momentum", bn.momentum},
              {"eps", bn.eps}};
}

nn::BatchNorm bn_from_json(const json& j) {
  nn::BatchNorm bn;
  bn.gamma = j.at("gamma").get<std::vector<double>>();
  bn.beta = j.at("beta").get<std::vector<double>>();
  bn.running_mean = j.at("running_mean").get<std::vector<double>>();
  bn.running_var = j.at("running_var").get<std::vector<double>>();
  bn.momentum = j.at("momentum").get<double>();
  bn.eps = j.at("eps").get<double>();
  return bn;
}

}  // namespace

void CganConfig::validate() const {
  if (latent_dim < 1) fail(Errc::InvalidConfig, kModule, "latent_dim must be >= 1");
  if (embed_dim < 1) fail(Errc::InvalidConfig, kModule, "embed_dim must be >= 1");
  if (batch_size < 2 || batch_size % 2 != 0) {
    fail(Errc::InvalidConfig, kModule, "batch_size must be even and >= 2");
  }
  if (gen_layers.empty() || disc_layers.empty()) {
    fail(Errc::InvalidConfig, kModule, "layer lists must be nonempty");
  }
  for (std::size_t w : gen_layers) {
    if (w < 1) fail(Errc::InvalidConfig, kModule, "generator widths must be >= 1");
  }
  for (std::size_t w : disc_layers) {
    if (w < 1) fail(Errc::InvalidConfig, kModule, "discriminator widths must be >= 1");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(Errc::InvalidConfig, kModule, "learning_rate must be positive");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    fail(Errc::InvalidConfig, kModule, "adam betas must lie in [0,1)");
  }
  if (!(acc_band_low >= 0.0 && acc_band_low <= acc_band_high && acc_band_high <= 1.0)) {
    fail(Errc::InvalidConfig, kModule, "accuracy band must satisfy 0 <= low <= high <= 1");
  }
}

std::vector<double> MinMaxScaler::scale(std::span<const double> raw) const {
  std::vector<double> out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const double range = hi[j] - lo[j];
    out[j] = range > 0.0 ? 2.0 * (raw[j] - lo[j]) / range - 1.0 : 0.0;
  }
  return out;
}

std::vector<double> MinMaxScaler::unscale(std::span<const double> scaled) const {
  std::vector<double> out(scaled.size());
  for (std::size_t j = 0; j < scaled.size(); ++j) {
    out[j] = lo[j] + 0.5 * (scaled[j] + 1.0) * (hi[j] - lo[j]);
  }
  return out;
}

std::size_t CganModel::parameter_count() const {
  std::size_t count = 0;
  const auto add = [&](const std::vector<double>& block) { count += block.size(); };
  visit_params(gen, add);
  visit_params(disc, add);
  return count;
}

CganModel cgan_init(const CganConfig& config, std::size_t feature_dim) {
  config.validate();
  if (feature_dim < 1) {
    fail(Errc::InvalidConfig, kModule, "feature_dim must be >= 1");
  }

  CganModel model;
  model.config = config;
  model.feature_dim = feature_dim;

  Rng rng(derive_seed(config.seed, "cgan/init"));

  std::size_t in = config.latent_dim + config.embed_dim;
  for (std::size_t width : config.gen_layers) {
    nn::Dense layer = nn::make_dense(in, width);
    nn::init_he_uniform(layer, rng);
    model.gen.hidden.push_back(std::move(layer));
    model.gen.norms.push_back(nn::make_batchnorm(width));
    in = width;
  }
  model.gen.out = nn::make_dense(in, feature_dim);
  nn::init_xavier_uniform(model.gen.out, rng);

  in = feature_dim + config.embed_dim;
  model.disc.leaky_slope = config.leaky_slope;
  for (std::size_t width : config.disc_layers) {
    nn::Dense layer = nn::make_dense(in, width);
    nn::init_he_uniform(layer, rng);
    model.disc.hidden.push_back(std::move(layer));
    in = width;
  }
  model.disc.out = nn::make_dense(in, 1);
  nn::init_xavier_uniform(model.disc.out, rng);

  model.label_embeddings = Matrix(kNumClasses, config.embed_dim);
  for (double& v : model.label_embeddings.data) v = rng.normal();

  model.gen_opt.beta1 = config.adam_beta1;
  model.gen_opt.beta2 = config.adam_beta2;
  model.gen_opt.reset(flatten(model.gen).size());
  model.disc_opt.beta1 = config.adam_beta1;
  model.disc_opt.beta2 = config.adam_beta2;
  model.disc_opt.reset(flatten(model.disc).size());
  return model;
}

std::pair<double, double> gan_loss(std::span<const double> d_real,
                                   std::span<const double> d_fake) {
  if (d_real.empty() || d_fake.empty()) {
    fail(Errc::InvalidArgument, kModule, "score batches must be nonempty");
  }
  for (double s : d_real) {
    if (!(s > 0.0 && s < 1.0)) {
      fail(Errc::ScoreOutOfRange, kModule, "real score outside (0,1)");
    }
  }
  for (double s : d_fake) {
    if (!(s > 0.0 && s < 1.0)) {
      fail(Errc::ScoreOutOfRange, kModule, "fake score outside (0,1)");
    }
  }
  double d_loss = 0.0;
  for (double s : d_real) d_loss -= std::log(s);
  d_loss /= static_cast<double>(d_real.size());
  double fake_term = 0.0;
  for (double s : d_fake) fake_term -= std::log(1.0 - s);
  d_loss += fake_term / static_cast<double>(d_fake.size());

  double g_loss = 0.0;  // non-saturating generator objective
  for (double s : d_fake) g_loss -= std::log(s);
  g_loss /= static_cast<double>(d_fake.size());
  return {d_loss, g_loss};
}

Matrix generator_forward_scaled(CganModel& model, const Matrix& z,
                                std::span<const PriorityLabel> labels,
                                bool training) {
  const Matrix input = concat_labels(z, labels, model.label_embeddings);
  return gen_forward(model.gen, input, training, nullptr);
}

double disc_loss_for_batch(const CganModel& model, const Matrix& x_real,
                           std::span<const PriorityLabel> real_labels,
                           const Matrix& x_fake,
                           std::span<const PriorityLabel> fake_labels,
                           std::vector<double>* flat_grads,
                           std::vector<double>* scores_real,
                           std::vector<double>* scores_fake) {
  const Matrix real_in = concat_labels(x_real, real_labels, model.label_embeddings);
  const Matrix fake_in = concat_labels(x_fake, fake_labels, model.label_embeddings);

  DiscCaches real_caches, fake_caches;
  const std::vector<double> real_logits =
      disc_forward(model.disc, real_in, &real_caches);
  const std::vector<double> fake_logits =
      disc_forward(model.disc, fake_in, &fake_caches);

  const double inv_r = 1.0 / static_cast<double>(real_logits.size());
  const double inv_f = 1.0 / static_cast<double>(fake_logits.size());

  // -mean log sigmoid(l_real) - mean log(1 - sigmoid(l_fake)), in logit space
  double loss = 0.0;
  for (double l : real_logits) loss += nn::softplus(-l) * inv_r;
  for (double l : fake_logits) loss += nn::softplus(l) * inv_f;

  if (scores_real != nullptr) {
    scores_real->resize(real_logits.size());
    for (std::size_t i = 0; i < real_logits.size(); ++i) {
      (*scores_real)[i] = nn::sigmoid(real_logits[i]);
    }
  }
  if (scores_fake != nullptr) {
    scores_fake->resize(fake_logits.size());
    for (std::size_t i = 0; i < fake_logits.size(); ++i) {
      (*scores_fake)[i] = nn::sigmoid(fake_logits[i]);
    }
  }

  if (flat_grads != nullptr) {
    std::vector<double> d_real_logits(real_logits.size());
    for (std::size_t i = 0; i < real_logits.size(); ++i) {
      d_real_logits[i] = (nn::sigmoid(real_logits[i]) - 1.0) * inv_r;
    }
    std::vector<double> d_fake_logits(fake_logits.size());
    for (std::size_t i = 0; i < fake_logits.size(); ++i) {
      d_fake_logits[i] = nn::sigmoid(fake_logits[i]) * inv_f;
    }
    Discriminator grad = zero_like(model.disc);
    disc_backward(model.disc, real_caches, d_real_logits, &grad);
    disc_backward(model.disc, fake_caches, d_fake_logits, &grad);
    *flat_grads = flatten(grad);
  }
  return loss;
}

double gen_loss_for_batch(CganModel& model, const Matrix& z,
                          std::span<const PriorityLabel> labels,
                          std::vector<double>* flat_grads) {
  const Matrix gen_in = concat_labels(z, labels, model.label_embeddings);
  GenCaches gen_caches;
  const Matrix y = gen_forward(model.gen, gen_in, true, &gen_caches);

  const Matrix disc_in = concat_labels(y, labels, model.label_embeddings);
  DiscCaches disc_caches;
  const std::vector<double> logits = disc_forward(model.disc, disc_in, &disc_caches);

  const double inv_n = 1.0 / static_cast<double>(logits.size());
  double loss = 0.0;  // -mean log sigmoid(l): wants the frozen disc to say "real"
  for (double l : logits) loss += nn::softplus(-l) * inv_n;

  if (flat_grads != nullptr) {
    std::vector<double> d_logits(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
      d_logits[i] = (nn::sigmoid(logits[i]) - 1.0) * inv_n;
    }
    const Matrix d_disc_in =
        disc_backward(model.disc, disc_caches, d_logits, nullptr);
    Matrix d_y(y.rows, y.cols);
    for (std::size_t i = 0; i < y.rows; ++i) {
      for (std::size_t j = 0; j < y.cols; ++j) d_y(i, j) = d_disc_in(i, j);
    }
    Generator grad = zero_like(model.gen);
    gen_backward(model.gen, gen_caches, d_y, grad);
    *flat_grads = flatten(grad);
  }
  return loss;
}

std::vector<double> gen_flat_params(const CganModel& model) {
  return flatten(model.gen);
}
void set_gen_flat_params(CganModel& model, std::span<const double> params) {
  unflatten(model.gen, params);
}
std::vector<double> disc_flat_params(const CganModel& model) {
  return flatten(model.disc);
}
void set_disc_flat_params(CganModel& model, std::span<const double> params) {
  unflatten(model.disc, params);
}

StepLosses cgan_train_step(CganModel& model, const Matrix& real_scaled,
                           std::span<const PriorityLabel> labels, Rng& rng) {
  if (real_scaled.rows == 0 || real_scaled.rows != labels.size()) {
    fail(Errc::InvalidArgument, kModule, "bad real batch");
  }
  const std::size_t half = real_scaled.rows;

  // discriminator update on half real / half generated
  const Matrix z1 = draw_latent(half, model.config.latent_dim, rng);
  const Matrix x_fake = generator_forward_scaled(model, z1, labels, true);

  std::vector<double> d_grads, scores_real, scores_fake;
  const double d_loss = disc_loss_for_batch(model, real_scaled, labels, x_fake,
                                            labels, &d_grads, &scores_real,
                                            &scores_fake);
  if (!std::isfinite(d_loss) || !all_finite(d_grads)) {
    fail(Errc::NonFiniteGradient, kModule, "discriminator step diverged");
  }
  std::vector<double> d_params = disc_flat_params(model);
  nn::adam_step(model.disc_opt, d_params, d_grads, model.config.learning_rate);
  set_disc_flat_params(model, d_params);

  std::size_t correct = 0;
  for (double s : scores_real) correct += s > 0.5 ? 1 : 0;
  for (double s : scores_fake) correct += s < 0.5 ? 1 : 0;
  const double accuracy =
      static_cast<double>(correct) / static_cast<double>(2 * half);

  // generator update through the frozen discriminator
  const Matrix z2 = draw_latent(half, model.config.latent_dim, rng);
  std::vector<double> g_grads;
  const double g_loss = gen_loss_for_batch(model, z2, labels, &g_grads);
  if (!std::isfinite(g_loss) || !all_finite(g_grads)) {
    fail(Errc::NonFiniteGradient, kModule, "generator step diverged");
  }
  std::vector<double> g_params = gen_flat_params(model);
  nn::adam_step(model.gen_opt, g_params, g_grads, model.config.learning_rate);
  set_gen_flat_params(model, g_params);

  return {d_loss, g_loss, accuracy};
}

TrainingTrace cgan_train(CganModel& model, const Dataset& data) {
  if (data.empty() || !data.fully_labeled()) {
    fail(Errc::InvalidArgument, kModule, "training data must be labeled and nonempty");
  }
  for (Provenance p : data.provenance) {
    if (p != Provenance::Real) {
      fail(Errc::InvalidArgument, kModule, "training data must be all Real provenance");
    }
  }

  const std::size_t n = data.size();
  const std::size_t f = model.feature_dim;

  // fit the [-1,1] scaler on this training data
  model.scaler.lo.assign(f, std::numeric_limits<double>::infinity());
  model.scaler.hi.assign(f, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const auto feats = data.observations[i].features();
    for (std::size_t j = 0; j < f; ++j) {
      model.scaler.lo[j] = std::min(model.scaler.lo[j], feats[j]);
      model.scaler.hi[j] = std::max(model.scaler.hi[j], feats[j]);
    }
  }

  Matrix x_scaled(n, f);
  std::vector<PriorityLabel> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto feats = data.observations[i].features();
    const auto scaled = model.scaler.scale(feats);
    for (std::size_t j = 0; j < f; ++j) x_scaled(i, j) = scaled[j];
    y[i] = *data.labels[i];
  }

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < n; ++i) {
    by_class[static_cast<std::size_t>(y[i])].push_back(i);
  }
  std::vector<std::size_t> classes_present;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (!by_class[c].empty()) classes_present.push_back(c);
  }

  Rng rng(derive_seed(model.config.seed, "cgan/train"));
  const std::size_t half = model.config.batch_size / 2;
  const std::size_t steps_per_epoch = std::max<std::size_t>(1, n / model.config.batch_size);

  TrainingTrace trace;
  std::size_t epochs_in_band = 0;

  for (std::size_t epoch = 0; epoch < model.config.epochs; ++epoch) {
    for (std::size_t c : classes_present) rng.shuffle(by_class[c]);
    std::array<std::size_t, kNumClasses> cursor{};
    std::size_t rotation = 0;

    TrainingTrace::EpochStats stats;
    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      Matrix real(half, f);
      std::vector<PriorityLabel> batch_labels(half);
      for (std::size_t i = 0; i < half; ++i) {
        // class-balanced: cycle through the present classes
        const std::size_t c = classes_present[rotation % classes_present.size()];
        ++rotation;
        const auto& pool = by_class[c];
        const std::size_t row = pool[cursor[c] % pool.size()];
        ++cursor[c];
        const auto src = x_scaled.row(row);
        std::copy(src.begin(), src.end(), real.row(i).begin());
        batch_labels[i] = y[row];
      }
      StepLosses losses;
      try {
        losses = cgan_train_step(model, real, batch_labels, rng);
      } catch (const Error& e) {
        if (e.code() == Errc::NonFiniteGradient) {
          fail(Errc::NonFiniteGradient, kModule,
               "diverged at epoch " + std::to_string(epoch));
        }
        throw;
      }
      stats.d_loss += losses.d_loss;
      stats.g_loss += losses.g_loss;
      stats.d_accuracy += losses.d_accuracy;
    }
    const double inv_steps = 1.0 / static_cast<double>(steps_per_epoch);
    stats.d_loss *= inv_steps;
    stats.g_loss *= inv_steps;
    stats.d_accuracy *= inv_steps;
    trace.epochs.push_back(stats);

    if (stats.d_accuracy >= model.config.acc_band_low &&
        stats.d_accuracy <= model.config.acc_band_high) {
      ++epochs_in_band;
      if (epochs_in_band >= model.config.acc_band_patience) break;
    } else {
      epochs_in_band = 0;
    }
  }
  return trace;
}

Dataset cgan_sample(const CganModel& model, PriorityLabel label, std::size_t n,
                    Rng& rng) {
  if (n < 1) {
    fail(Errc::InvalidArgument, kModule, "n must be >= 1");
  }
  if (!model.scaler.fitted()) {
    fail(Errc::InvalidArgument, kModule, "model has no fitted scaler; train first");
  }
  if (model.feature_dim != kFeatureDim) {
    fail(Errc::DimensionMismatch, kModule,
         "sampling observations needs the 6-feature schema");
  }

  const Matrix z = draw_latent(n, model.config.latent_dim, rng);
  std::vector<PriorityLabel> labels(n, label);
  const Matrix input = concat_labels(z, labels, model.label_embeddings);

  // inference mode: frozen running averages, no state mutation
  Matrix h = input;
  for (std::size_t i = 0; i < model.gen.hidden.size(); ++i) {
    h = nn::relu(nn::bn_forward_eval(model.gen.norms[i],
                                     nn::dense_forward(model.gen.hidden[i], h)));
  }
  const Matrix y = nn::tanh_forward(nn::dense_forward(model.gen.out, h));

  Dataset out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> raw = model.scaler.unscale(y.row(i));
    // clip to valid observation ranges
    for (std::size_t j = 0; j < 4; ++j) raw[j] = std::max(0.0, raw[j]);
    raw[4] = std::clamp(raw[4], 0.0, 1.0);
    raw[5] = std::clamp(std::round(raw[5]), 0.0, 23.0);
    MicrogridObservation obs = MicrogridObservation::from_features(raw);
    obs.validate();
    out.push_back(obs, label, Provenance::Generated);
  }
  return out;
}

std::string serialize_cgan(const CganModel& model) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "cgan";
  j["feature_dim"] = model.feature_dim;
  j["config"] = json{{"latent_dim", model.config.latent_dim},
                     {"embed_dim", model.config.embed_dim},
                     {"gen_layers", model.config.gen_layers},
                     {"disc_layers", model.config.disc_layers},
                     {"epochs", model.config.epochs},
                     {"batch_size", model.config.batch_size},
                     {"learning_rate", model.config.learning_rate},
                     {"adam_beta1", model.config.adam_beta1},
                     {"adam_beta2", model.config.adam_beta2},
                     {"leaky_slope", model.config.leaky_slope},
                     {"acc_band_low", model.config.acc_band_low},
                     {"acc_band_high", model.config.acc_band_high},
                     {"acc_band_patience", model.config.acc_band_patience},
                     {"seed", model.config.seed}};

  json gen_hidden = json::array();
  for (const auto& layer : model.gen.hidden) gen_hidden.push_back(dense_to_json(layer));
  json gen_norms = json::array();
  for (const auto& bn : model.gen.norms) gen_norms.push_back(bn_to_json(bn));
  j["generator"] = json{{"hidden", gen_hidden},
                        {"norms", gen_norms},
                        {"out", dense_to_json(model.gen.out)}};

  json disc_hidden = json::array();
  for (const auto& layer : model.disc.hidden) disc_hidden.push_back(dense_to_json(layer));
  j["discriminator"] = json{{"hidden", disc_hidden},
                            {"out", dense_to_json(model.disc.out)},
                            {"leaky_slope", model.disc.leaky_slope}};

  j["label_embeddings"] = model.label_embeddings.data;
  j["gen_opt"] = json{{"m", model.gen_opt.m}, {"v", model.gen_opt.v}, {"t", model.gen_opt.t}};
  j["disc_opt"] =
      json{{"m", model.disc_opt.m}, {"v", model.disc_opt.v}, {"t", model.disc_opt.t}};
  j["scaler"] = json{{"lo", model.scaler.lo}, {"hi", model.scaler.hi}};
  return j.dump(2) + "\n";
}

CganModel deserialize_cgan(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::Io, kModule, std::string("bad checkpoint: ") + e.what());
  }
  if (j.value("kind", "") != "cgan" || j.value("format_version", 0) != 1) {
    fail(Errc::Io, kModule, "not a cgan checkpoint");
  }
  CganModel model;
  const auto& cfg = j.at("config");
  model.config.latent_dim = cfg.at("latent_dim").get<std::size_t>();
  model.config.embed_dim = cfg.at("embed_dim").get<std::size_t>();
  model.config.gen_layers = cfg.at("gen_layers").get<std::vector<std::size_t>>();
  model.config.disc_layers = cfg.at("disc_layers").get<std::vector<std::size_t>>();
  model.config.epochs = cfg.at("epochs").get<std::size_t>();
  model.config.batch_size = cfg.at("batch_size").get<std::size_t>();
  model.config.learning_rate = cfg.at("learning_rate").get<double>();
  model.config.adam_beta1 = cfg.at("adam_beta1").get<double>();
  model.config.adam_beta2 = cfg.at("adam_beta2").get<double>();
  model.config.leaky_slope = cfg.at("leaky_slope").get<double>();
  model.config.acc_band_low = cfg.at("acc_band_low").get<double>();
  model.config.acc_band_high = cfg.at("acc_band_high").get<double>();
  model.config.acc_band_patience = cfg.at("acc_band_patience").get<std::size_t>();
  model.config.seed = cfg.at("seed").get<std::uint64_t>();
  model.feature_dim = j.at("feature_dim").get<std::size_t>();

  for (const auto& layer : j.at("generator").at("hidden")) {
    model.gen.hidden.push_back(dense_from_json(layer));
  }
  for (const auto& bn : j.at("generator").at("norms")) {
    model.gen.norms.push_back(bn_from_json(bn));
  }
  model.gen.out = dense_from_json(j.at("generator").at("out"));

  for (const auto& layer : j.at("discriminator").at("hidden")) {
    model.disc.hidden.push_back(dense_from_json(layer));
  }
  model.disc.out = dense_from_json(j.at("discriminator").at("out"));
  model.disc.leaky_slope = j.at("discriminator").at("leaky_slope").get<double>();

  model.label_embeddings = Matrix(kNumClasses, model.config.embed_dim);
  model.label_embeddings.data = j.at("label_embeddings").get<std::vector<double>>();

  model.gen_opt.beta1 = model.config.adam_beta1;
  model.gen_opt.beta2 = model.config.adam_beta2;
  model.gen_opt.m = j.at("gen_opt").at("m").get<std::vector<double>>();
  model.gen_opt.v = j.at("gen_opt").at("v").get<std::vector<double>>();
  model.gen_opt.t = j.at("gen_opt").at("t").get<std::uint64_t>();
  model.disc_opt.beta1 = model.config.adam_beta1;
  model.disc_opt.beta2 = model.config.adam_beta2;
  model.disc_opt.m = j.at("disc_opt").at("m").get<std::vector<double>>();
  model.disc_opt.v = j.at("disc_opt").at("v").get<std::vector<double>>();
  model.disc_opt.t = j.at("disc_opt").at("t").get<std::uint64_t>();

  model.scaler.lo = j.at("scaler").at("lo").get<std::vector<double>>();
  model.scaler.hi = j.at("scaler").at("hi").get<std::vector<double>>();
  return model;
}

void write_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path) {
  std::string out = "epoch,d_loss,g_loss,d_accuracy\n";
  for (std::size_t e = 0; e < trace.epochs.size(); ++e) {
    out += std::to_string(e);
    out += ',';
    out += format_double(trace.epochs[e].d_loss);
    out += ',';
    out += format_double(trace.epochs[e].g_loss);
    out += ',';
    out += format_double(trace.epochs[e].d_accuracy);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace v2m
