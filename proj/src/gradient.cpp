#include "cno/gradient.hpp"

#include <cmath>

#include "cno/errors.hpp"

namespace cno {

namespace {

// Derivative of the (possibly squared) hinge penalty of minor i at value
// delta, with the inactive-side subgradient fixed to 0.
double penalty_slope(double delta, int i, PenaltyForm form) {
  const bool odd = (i % 2 == 1);
  const double l = odd ? std::max(0.0, delta) : std::max(0.0, -delta);
  if (l == 0.0) return 0.0;
  const double hinge_slope = odd ? 1.0 : -1.0;
  return form == PenaltyForm::SquaredHinge ? 2.0 * l * hinge_slope : hinge_slope;
}

// Per-point mpdi penalty; when `d_bar` is non-null, also the derivative of
// the penalty with respect to the entries of D.
double point_penalty(const Mat& d, const LossSpec& spec, Mat* d_bar) {
  const Vec minors = leading_minors(d);
  double sum = 0.0;
  if (d_bar) d_bar->setZero(d.rows(), d.cols());
  for (int i = 1; i <= minors.size(); ++i) {
    double l = minor_penalty(minors, i);
    if (spec.penalty_form == PenaltyForm::SquaredHinge) l *= l;
    sum += spec.rho[i - 1] * l;
    if (d_bar) {
      const double slope = penalty_slope(minors[i - 1], i, spec.penalty_form);
      if (slope != 0.0 && spec.rho[i - 1] != 0.0) {
        *d_bar += spec.rho[i - 1] * slope * leading_minor_gradient(d, i);
      }
    }
  }
  return sum;
}

struct ParamGrads {
  std::vector<Mat> w;
  std::vector<Vec> b;

  explicit ParamGrads(const Mlp& net) {
    for (int l = 0; l < net.layer_count(); ++l) {
      w.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
      b.push_back(Vec::Zero(net.biases[l].size()));
    }
  }

  Vec packed(const Mlp& net) const {
    Mlp shell = net;
    shell.weights = w;
    shell.biases = b;
    return pack(shell);
  }
};

// Backpropagate accumulated pre-activation adjoints a_bar[l] through the
// primal chain a_l = W_l z_l + b_l, z_{l+1} = act(a_l).
void backprop_primal(const Mlp& net, const ForwardCache& fwd, std::vector<Mat>& a_bar,
                     ParamGrads& grads) {
  for (int l = net.layer_count() - 1; l >= 0; --l) {
    if (a_bar[l].size() == 0) continue;
    grads.w[l].noalias() += a_bar[l] * fwd.z[l].transpose();
    grads.b[l] += a_bar[l].rowwise().sum();
    if (l > 0) {
      const Mat z_bar = net.weights[l].transpose() * a_bar[l];
      const Mat s = activation_deriv(net.activation, fwd.a[l - 1]);
      if (a_bar[l - 1].size() == 0) a_bar[l - 1] = Mat::Zero(s.rows(), s.cols());
      a_bar[l - 1].array() += s.array() * z_bar.array();
    }
  }
}

// Reverse sweep of the input-Jacobian accumulation
//   h_l = W_l g_l,  g_{l+1} = diag(s_l) h_l,  s_l = act'(a_l),
// seeded with j_bar = dS/dJ blocks. Emits weight gradients and
// pre-activation adjoints (via s_l = act'(a_l)).
void backprop_jacobian(const Mlp& net, const ForwardCache& fwd, const JacobianCache& jac,
                       Mat h_bar, std::vector<Mat>& a_bar, ParamGrads& grads) {
  const int d0 = jac.input_dim;
  const int batch = jac.batch;
  for (int l = net.layer_count() - 1; l >= 0; --l) {
    grads.w[l].noalias() += h_bar * jac.g[l].transpose();
    if (l == 0) break;
    Mat g_bar = net.weights[l].transpose() * h_bar;

    // g_l = diag(s_{l-1}) h_{l-1}: adjoints of s and h.
    const Mat s = activation_deriv(net.activation, fwd.a[l - 1]);
    Mat s_bar = Mat::Zero(s.rows(), batch);
    h_bar.resize(g_bar.rows(), g_bar.cols());
    for (int j = 0; j < batch; ++j) {
      const auto gb = g_bar.middleCols(static_cast<long>(j) * d0, d0);
      const auto hprev = jac.h[l - 1].middleCols(static_cast<long>(j) * d0, d0);
      s_bar.col(j) = (gb.array() * hprev.array()).rowwise().sum();
      h_bar.middleCols(static_cast<long>(j) * d0, d0) =
          gb.array().colwise() * s.col(j).array();
    }

    const Mat spp = activation_second_deriv(net.activation, fwd.z[l], s);
    if (a_bar[l - 1].size() == 0) a_bar[l - 1] = Mat::Zero(s.rows(), batch);
    a_bar[l - 1].array() += spp.array() * s_bar.array();
  }
}

LossGradient evaluate(const SystemModel& system, const Mlp& net, const CollocationSet& batch,
                      const LossSpec& spec, bool want_grad) {
  const int count = batch.size();
  if (count < 1) throw PreconditionError("loss evaluation: empty batch");
  spec.check(system.n);
  const int n = system.n;
  const int p = system.p;
  if (net.input_dim() != n + p || net.output_dim() != n)
    throw ShapeError("loss evaluation: network shape does not match the system");

  LossGradient result;
  ParamGrads grads(net);

  // --- mpdi term: depends on the network through its input-Jacobian ---
  const ForwardCache fwd = forward_cached(net, batch.inputs());
  const JacobianCache jac = input_jacobian_cached(net, fwd);

  double mpdi_sum = 0.0;
  Mat j_bar;
  if (want_grad) j_bar = Mat::Zero(n, static_cast<long>(n + p) * count);
  Mat d_bar;
  for (int j = 0; j < count; ++j) {
    const Mat d = contraction_matrix_from_jacobian(system, batch.x.col(j), jac.jacobian(j),
                                                   spec.lambda);
    if (!d.allFinite())
      throw NumericError("loss evaluation: non-finite contraction matrix at collocation point " +
                             std::to_string(j),
                         j);
    mpdi_sum += point_penalty(d, spec, want_grad ? &d_bar : nullptr);
    if (want_grad) {
      // D = He{...} + 2 lambda I is symmetric in the Jacobian block.
      j_bar.block(0, static_cast<long>(j) * (n + p), n, n) =
          0.5 * (d_bar + d_bar.transpose());
    }
  }
  result.value.mpdi = mpdi_sum / count;

  std::vector<Mat> a_bar(net.layer_count());
  if (want_grad && spec.mu1 != 0.0) {
    backprop_jacobian(net, fwd, jac, (spec.mu1 / count) * j_bar, a_bar, grads);
    backprop_primal(net, fwd, a_bar, grads);
  }

  // --- bc term: plain forward/backward at the on-manifold inputs ---
  Mat on_manifold(n + p, count);
  on_manifold.topRows(n) = batch.x;
  for (int j = 0; j < count; ++j) {
    on_manifold.col(j).tail(p) = system.h(batch.x.col(j));
  }
  const ForwardCache bc_fwd = forward_cached(net, on_manifold);
  const Mat& bc_out = bc_fwd.output();
  if (!bc_out.allFinite()) throw NumericError("loss evaluation: non-finite bc output");
  result.value.bc = bc_out.colwise().squaredNorm().mean();

  if (want_grad && spec.mu2 != 0.0) {
    std::vector<Mat> bc_a_bar(net.layer_count());
    bc_a_bar.back() = (2.0 * spec.mu2 / count) * bc_out;
    backprop_primal(net, bc_fwd, bc_a_bar, grads);
  }

  result.value.total = spec.mu1 * result.value.mpdi + spec.mu2 * result.value.bc;
  if (want_grad) {
    result.grad = grads.packed(net);
    if (!result.grad.allFinite()) throw NumericError("loss evaluation: non-finite gradient");
  }
  return result;
}

}  // namespace

LossValue loss_value(const SystemModel& system, const Mlp& net, const CollocationSet& batch,
                     const LossSpec& spec) {
  return evaluate(system, net, batch, spec, false).value;
}

LossGradient loss_gradient(const SystemModel& system, const Mlp& net,
                           const CollocationSet& batch, const LossSpec& spec) {
  return evaluate(system, net, batch, spec, true);
}

}  // namespace cno
