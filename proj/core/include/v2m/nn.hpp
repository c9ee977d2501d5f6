#pragma once

#include <cstdint>
#include <vector>

#include "v2m/matrix.hpp"
#include "v2m/rng.hpp"

namespace v2m::nn {

/// Fully connected layer, y = x W^T + b. W is out x in.
struct Dense {
  Matrix w;
  std::vector<double> b;

  std::size_t fan_in() const { return w.cols; }
  std::size_t fan_out() const { return w.rows; }
};

Dense make_dense(std::size_t in, std::size_t out);
void init_he_uniform(Dense& layer, Rng& rng);
void init_xavier_uniform(Dense& layer, Rng& rng);

Matrix dense_forward(const Dense& layer, const Matrix& x);
/// Accumulates parameter gradients into `grad` (same shape as the layer) and
/// returns the gradient with respect to the input.
Matrix dense_backward(const Dense& layer, const Matrix& x_in, const Matrix& d_out,
                      Dense& grad);

/// Per-feature batch normalization. Training mode uses batch statistics
/// (population variance) and advances the running averages; inference mode
/// uses the frozen running averages.
struct BatchNorm {
  std::vector<double> gamma, beta;
  std::vector<double> running_mean, running_var;
  double momentum = 0.9;
  double eps = 1e-5;
};

BatchNorm make_batchnorm(std::size_t width);

struct BnCache {
  Matrix xhat;
  std::vector<double> inv_std;
};

Matrix bn_forward_train(BatchNorm& bn, const Matrix& x, BnCache& cache);
Matrix bn_forward_eval(const BatchNorm& bn, const Matrix& x);
/// Gradients for gamma/beta go into `grad` (only those fields are used).
Matrix bn_backward(const BatchNorm& bn, const BnCache& cache, const Matrix& d_out,
                   BatchNorm& grad);

Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& x_pre, const Matrix& d_out);
Matrix leaky_relu(const Matrix& x, double slope);
Matrix leaky_relu_backward(const Matrix& x_pre, const Matrix& d_out, double slope);
Matrix tanh_forward(const Matrix& x);
Matrix tanh_backward(const Matrix& y, const Matrix& d_out);  // y = tanh(x)

inline double sigmoid(double logit) { return 1.0 / (1.0 + std::exp(-logit)); }
/// log(1 + e^z) without overflow.
double softplus(double z);

/// Adaptive moment estimation over a flat parameter vector.
struct Adam {
  std::vector<double> m, v;
  std::uint64_t t = 0;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;

  void reset(std::size_t size) {
    m.assign(size, 0.0);
    v.assign(size, 0.0);
    t = 0;
  }
};

void adam_step(Adam& state, std::vector<double>& params,
               const std::vector<double>& grads, double learning_rate);

}  // namespace v2m::nn
