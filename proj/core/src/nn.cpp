#include "v2m/nn.hpp"

#include <cmath>

namespace v2m::nn {

Dense make_dense(std::size_t in, std::size_t out) {
  Dense layer;
  layer.w = Matrix(out, in);
  layer.b.assign(out, 0.0);
  return layer;
}

void init_he_uniform(Dense& layer, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(layer.fan_in()));
  for (double& w : layer.w.data) w = rng.uniform(-limit, limit);
}

void init_xavier_uniform(Dense& layer, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(layer.fan_in() + layer.fan_out()));
  for (double& w : layer.w.data) w = rng.uniform(-limit, limit);
}

Matrix dense_forward(const Dense& layer, const Matrix& x) {
  Matrix y(x.rows, layer.fan_out());
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto xi = x.row(i);
    auto yi = y.row(i);
    for (std::size_t o = 0; o < layer.fan_out(); ++o) {
      double s = layer.b[o];
      const auto w = layer.w.row(o);
      for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * xi[j];
      yi[o] = s;
    }
  }
  return y;
}

Matrix dense_backward(const Dense& layer, const Matrix& x_in, const Matrix& d_out,
                      Dense& grad) {
  // dW += dY^T X, db += colsum(dY), dX = dY W
  for (std::size_t i = 0; i < x_in.rows; ++i) {
    const auto xi = x_in.row(i);
    const auto dyi = d_out.row(i);
    for (std::size_t o = 0; o < layer.fan_out(); ++o) {
      const double dy = dyi[o];
      grad.b[o] += dy;
      auto gw = grad.w.row(o);
      for (std::size_t j = 0; j < xi.size(); ++j) gw[j] += dy * xi[j];
    }
  }
  Matrix d_in(x_in.rows, layer.fan_in());
  for (std::size_t i = 0; i < x_in.rows; ++i) {
    const auto dyi = d_out.row(i);
    auto di = d_in.row(i);
    for (std::size_t o = 0; o < layer.fan_out(); ++o) {
      const double dy = dyi[o];
      const auto w = layer.w.row(o);
      for (std::size_t j = 0; j < w.size(); ++j) di[j] += dy * w[j];
    }
  }
  return d_in;
}

BatchNorm make_batchnorm(std::size_t width) {
  BatchNorm bn;
  bn.gamma.assign(width, 1.0);
  bn.beta.assign(width, 0.0);
  bn.running_mean.assign(width, 0.0);
  bn.running_var.assign(width, 1.0);
  return bn;
}

Matrix bn_forward_train(BatchNorm& bn, const Matrix& x, BnCache& cache) {
  const std::size_t n = x.rows;
  const std::size_t width = x.cols;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> mean(width, 0.0), var(width, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < width; ++j) mean[j] += xi[j];
  }
  for (std::size_t j = 0; j < width; ++j) mean[j] *= inv_n;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < width; ++j) {
      const double dev = xi[j] - mean[j];
      var[j] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < width; ++j) var[j] *= inv_n;

  cache.inv_std.resize(width);
  for (std::size_t j = 0; j < width; ++j) {
    cache.inv_std[j] = 1.0 / std::sqrt(var[j] + bn.eps);
  }
  cache.xhat = Matrix(n, width);
  Matrix y(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < width; ++j) {
      const double xh = (xi[j] - mean[j]) * cache.inv_std[j];
      cache.xhat(i, j) = xh;
      y(i, j) = bn.gamma[j] * xh + bn.beta[j];
    }
  }
  for (std::size_t j = 0; j < width; ++j) {
    bn.running_mean[j] = bn.momentum * bn.running_mean[j] + (1.0 - bn.momentum) * mean[j];
    bn.running_var[j] = bn.momentum * bn.running_var[j] + (1.0 - bn.momentum) * var[j];
  }
  return y;
}

Matrix bn_forward_eval(const BatchNorm& bn, const Matrix& x) {
  Matrix y(x.rows, x.cols);
  for (std::size_t j = 0; j < x.cols; ++j) {
    const double inv_std = 1.0 / std::sqrt(bn.running_var[j] + bn.eps);
    for (std::size_t i = 0; i < x.rows; ++i) {
      y(i, j) = bn.gamma[j] * (x(i, j) - bn.running_mean[j]) * inv_std + bn.beta[j];
    }
  }
  return y;
}

Matrix bn_backward(const BatchNorm& bn, const BnCache& cache, const Matrix& d_out,
                   BatchNorm& grad) {
  const std::size_t n = d_out.rows;
  const std::size_t width = d_out.cols;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> d_beta(width, 0.0), d_gamma(width, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto dyi = d_out.row(i);
    for (std::size_t j = 0; j < width; ++j) {
      d_beta[j] += dyi[j];
      d_gamma[j] += dyi[j] * cache.xhat(i, j);
    }
  }
  for (std::size_t j = 0; j < width; ++j) {
    grad.beta[j] += d_beta[j];
    grad.gamma[j] += d_gamma[j];
  }

  Matrix d_in(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    const auto dyi = d_out.row(i);
    auto di = d_in.row(i);
    for (std::size_t j = 0; j < width; ++j) {
      di[j] = bn.gamma[j] * cache.inv_std[j] * inv_n *
              (static_cast<double>(n) * dyi[j] - d_beta[j] -
               cache.xhat(i, j) * d_gamma[j]);
    }
  }
  return d_in;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_backward(const Matrix& x_pre, const Matrix& d_out) {
  Matrix d_in = d_out;
  for (std::size_t i = 0; i < d_in.data.size(); ++i) {
    if (x_pre.data[i] <= 0.0) d_in.data[i] = 0.0;
  }
  return d_in;
}

Matrix leaky_relu(const Matrix& x, double slope) {
  Matrix y = x;
  for (double& v : y.data) v = v > 0.0 ? v : slope * v;
  return y;
}

Matrix leaky_relu_backward(const Matrix& x_pre, const Matrix& d_out, double slope) {
  Matrix d_in = d_out;
  for (std::size_t i = 0; i < d_in.data.size(); ++i) {
    if (x_pre.data[i] <= 0.0) d_in.data[i] *= slope;
  }
  return d_in;
}

Matrix tanh_forward(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data) v = std::tanh(v);
  return y;
}

Matrix tanh_backward(const Matrix& y, const Matrix& d_out) {
  Matrix d_in = d_out;
  for (std::size_t i = 0; i < d_in.data.size(); ++i) {
    d_in.data[i] *= 1.0 - y.data[i] * y.data[i];
  }
  return d_in;
}

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void adam_step(Adam& state, std::vector<double>& params,
               const std::vector<double>& grads, double learning_rate) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

}  // namespace v2m::nn
