#include "cno/mlp.hpp"

#include <cmath>

#include "cno/errors.hpp"
#include "cno/rng.hpp"

namespace cno {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh:
      return "tanh";
    case Activation::Identity:
      return "identity";
  }
  return "tanh";
}

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw ConfigError("unknown activation '" + name + "' (expected tanh or identity)");
}

std::size_t Mlp::param_count() const {
  std::size_t count = 0;
  for (const auto& w : weights) count += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) count += static_cast<std::size_t>(b.size());
  return count;
}

void Mlp::check_shape() const {
  if (layer_dims.size() < 2) throw ShapeError("mlp: need at least input and output dims");
  for (int d : layer_dims) {
    if (d < 1) throw ShapeError("mlp: layer dimension must be positive");
  }
  const std::size_t layers = layer_dims.size() - 1;
  if (weights.size() != layers || biases.size() != layers)
    throw ShapeError("mlp: weights/biases count does not match layer_dims");
  for (std::size_t l = 0; l < layers; ++l) {
    if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l])
      throw ShapeError("mlp: weight shape mismatch at layer " + std::to_string(l));
    if (biases[l].size() != layer_dims[l + 1])
      throw ShapeError("mlp: bias length mismatch at layer " + std::to_string(l));
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw ShapeError("mlp: non-finite parameter at layer " + std::to_string(l));
  }
}

Mlp init_params(const std::vector<int>& layer_dims, std::uint64_t seed, Activation activation) {
  Mlp net;
  net.layer_dims = layer_dims;
  net.activation = activation;
  if (layer_dims.size() < 2) throw ShapeError("init_params: need at least input and output dims");

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Mat w(fan_out, fan_in);
    // Row-major fill so the draw order matches the pack() layout.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        w(r, c) = rng.uniform(-limit, limit);
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vec::Zero(fan_out));
  }
  net.check_shape();
  return net;
}

Vec pack(const Mlp& net) {
  Vec flat(static_cast<long>(net.param_count()));
  long k = 0;
  for (const auto& w : net.weights) {
    for (long r = 0; r < w.rows(); ++r) {
      for (long c = 0; c < w.cols(); ++c) flat[k++] = w(r, c);
    }
  }
  for (const auto& b : net.biases) {
    for (long i = 0; i < b.size(); ++i) flat[k++] = b[i];
  }
  return flat;
}

void unpack(const Vec& params, Mlp& net) {
  if (params.size() != static_cast<long>(net.param_count()))
    throw ShapeError("unpack: parameter vector length does not match network shape");
  long k = 0;
  for (auto& w : net.weights) {
    for (long r = 0; r < w.rows(); ++r) {
      for (long c = 0; c < w.cols(); ++c) w(r, c) = params[k++];
    }
  }
  for (auto& b : net.biases) {
    for (long i = 0; i < b.size(); ++i) b[i] = params[k++];
  }
}

Mat activation_value(Activation act, const Mat& a) {
  switch (act) {
    case Activation::Tanh:
      return a.array().tanh().matrix();
    case Activation::Identity:
      return a;
  }
  return a;
}

Mat activation_deriv(Activation act, const Mat& a) {
  switch (act) {
    case Activation::Tanh:
      return (1.0 - a.array().tanh().square()).matrix();
    case Activation::Identity:
      return Mat::Ones(a.rows(), a.cols());
  }
  return Mat::Ones(a.rows(), a.cols());
}

Mat activation_second_deriv(Activation act, const Mat& z, const Mat& s) {
  switch (act) {
    case Activation::Tanh:
      return (-2.0 * z.array() * s.array()).matrix();
    case Activation::Identity:
      return Mat::Zero(z.rows(), z.cols());
  }
  return Mat::Zero(z.rows(), z.cols());
}

ForwardCache forward_cached(const Mlp& net, const Mat& inputs) {
  net.check_shape();
  if (inputs.rows() != net.input_dim())
    throw ShapeError("forward: input dimension " + std::to_string(inputs.rows()) +
                     " does not match network input " + std::to_string(net.input_dim()));
  if (!inputs.allFinite()) throw NumericError("forward: non-finite input");

  const int layers = net.layer_count();
  ForwardCache cache;
  cache.z.reserve(layers);
  cache.a.reserve(layers);
  cache.z.push_back(inputs);
  for (int l = 0; l < layers; ++l) {
    Mat a = net.weights[l] * cache.z[l];
    a.colwise() += net.biases[l];
    cache.a.push_back(std::move(a));
    if (l + 1 < layers) {
      cache.z.push_back(activation_value(net.activation, cache.a[l]));
    }
  }
  return cache;
}

Mat forward(const Mlp& net, const Mat& inputs) { return forward_cached(net, inputs).output(); }

Vec forward(const Mlp& net, const Vec& input) {
  return forward(net, Mat(input)).col(0);
}

JacobianCache input_jacobian_cached(const Mlp& net, const ForwardCache& fwd) {
  const int layers = net.layer_count();
  const int d0 = net.input_dim();
  const int batch = static_cast<int>(fwd.z[0].cols());

  JacobianCache cache;
  cache.input_dim = d0;
  cache.batch = batch;
  cache.g.reserve(layers);
  cache.h.reserve(layers);

  Mat g0 = Mat::Zero(d0, static_cast<long>(d0) * batch);
  for (int j = 0; j < batch; ++j) {
    g0.block(0, static_cast<long>(j) * d0, d0, d0).setIdentity();
  }
  cache.g.push_back(std::move(g0));

  for (int l = 0; l < layers; ++l) {
    cache.h.push_back(net.weights[l] * cache.g[l]);
    if (l + 1 < layers) {
      const Mat s = activation_deriv(net.activation, fwd.a[l]);
      Mat next = cache.h[l];
      for (int j = 0; j < batch; ++j) {
        next.middleCols(static_cast<long>(j) * d0, d0).array().colwise() *=
            s.col(j).array();
      }
      cache.g.push_back(std::move(next));
    }
  }
  return cache;
}

Mat input_jacobian(const Mlp& net, const Vec& input) {
  const ForwardCache fwd = forward_cached(net, Mat(input));
  return input_jacobian_cached(net, fwd).jacobians();
}

double lipschitz_bound(const Mlp& net) {
  net.check_shape();
  const int p = net.input_dim() - net.output_dim();
  if (p < 1)
    throw ShapeError("lipschitz_bound: network input must be wider than its output");

  // First layer restricted to the y columns (the trailing p inputs).
  double bound = spectral_norm(net.weights.front().rightCols(p));
  for (int l = 1; l < net.layer_count(); ++l) {
    bound *= spectral_norm(net.weights[l]);
  }
  return bound;
}

}  // namespace cno
