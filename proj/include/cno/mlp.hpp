#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cno/linalg.hpp"

namespace cno {

// Hidden-layer activation. The output layer is always linear. Tanh keeps the
// network C^1 with globally 1-Lipschitz hidden layers; Identity exists for
// linear nets in tests and constructed gains.
enum class Activation { Tanh, Identity };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Feed-forward network u -> T(u). layer_dims runs input to output, so
// weights[l] has shape layer_dims[l+1] x layer_dims[l]. Evaluation never
// mutates the network; training replaces parameters through pack/unpack.
struct Mlp {
  std::vector<int> layer_dims;
  std::vector<Mat> weights;
  std::vector<Vec> biases;
  Activation activation = Activation::Tanh;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::size_t param_count() const;

  // Throws ShapeError if weights/biases do not match layer_dims or any
  // parameter is non-finite.
  void check_shape() const;
};

// Glorot-uniform weights, zero biases, deterministic for a given seed.
Mlp init_params(const std::vector<int>& layer_dims, std::uint64_t seed,
                Activation activation = Activation::Tanh);

// Flat parameter layout: for each layer, the weight matrix in row-major
// order; then for each layer, the bias vector. pack/unpack round-trip
// exactly.
Vec pack(const Mlp& net);
void unpack(const Vec& params, Mlp& net);

Vec forward(const Mlp& net, const Vec& input);
// Batched forward, one sample per column.
Mat forward(const Mlp& net, const Mat& inputs);

// Exact Jacobian of forward with respect to the input,
// output_dim x input_dim.
Mat input_jacobian(const Mlp& net, const Vec& input);

// Upper bound on the Lipschitz constant of the net with respect to its
// trailing y-block of inputs (the last input_dim - output_dim coordinates):
// spectral norm of the first layer restricted to the y columns times the
// spectral norms of the remaining layers (hidden activations are
// 1-Lipschitz).
double lipschitz_bound(const Mlp& net);

// --- batched evaluation with cached intermediates -------------------------
//
// The gradient engine and the grid verifier evaluate many points at once;
// both need the per-layer intermediates, so the forward and Jacobian passes
// cache them. Samples are columns.

struct ForwardCache {
  // z[l]: activations entering layer l (z[0] = inputs), layer_dims[l] x B.
  // a[l]: pre-activations of layer l, layer_dims[l+1] x B.
  std::vector<Mat> z;
  std::vector<Mat> a;
  const Mat& output() const { return a.back(); }
};

ForwardCache forward_cached(const Mlp& net, const Mat& inputs);

// Input-Jacobian accumulation J = W_{L-1} S_{L-2} W_{L-2} ... S_0 W_0 where
// S_l = diag(act'(a_l)). Per sample, g/h hold the partial products as
// horizontal blocks of width input_dim:
//   g[0] = [I | I | ... | I],  h[l] = W_l g[l],  g[l+1] = S_l . h[l].
struct JacobianCache {
  std::vector<Mat> g;  // g[l]: layer_dims[l] x (input_dim * B)
  std::vector<Mat> h;  // h[l]: layer_dims[l+1] x (input_dim * B)
  int input_dim = 0;
  int batch = 0;
  const Mat& jacobians() const { return h.back(); }
  // Jacobian of sample j as a view into the last h block.
  Eigen::Block<const Mat> jacobian(int j) const {
    return h.back().block(0, j * input_dim, h.back().rows(), input_dim);
  }
};

JacobianCache input_jacobian_cached(const Mlp& net, const ForwardCache& fwd);

// Activation derivative helpers on cached pre-activations.
Mat activation_value(Activation act, const Mat& a);
Mat activation_deriv(Activation act, const Mat& a);
// Second derivative expressed through value and first derivative
// (tanh'' = -2 z s with z = tanh(a), s = 1 - z^2).
Mat activation_second_deriv(Activation act, const Mat& z, const Mat& s);

}  // namespace cno
