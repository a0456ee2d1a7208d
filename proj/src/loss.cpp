#include "cno/loss.hpp"

#include <cmath>

#include "cno/errors.hpp"

namespace cno {

std::string penalty_form_name(PenaltyForm f) {
  return f == PenaltyForm::Hinge ? "hinge" : "squared-hinge";
}

PenaltyForm penalty_form_from_name(const std::string& name) {
  if (name == "hinge") return PenaltyForm::Hinge;
  if (name == "squared-hinge" || name == "squared_hinge") return PenaltyForm::SquaredHinge;
  throw ConfigError("unknown penalty_form '" + name + "' (expected hinge or squared-hinge)");
}

void LossSpec::check(int n) const {
  if (!(mu1 >= 0.0) || !(mu2 >= 0.0)) throw ConfigError("loss: mu1 and mu2 must be >= 0");
  if (!std::isfinite(lambda)) throw ConfigError("loss: lambda must be finite");
  if (rho.size() != n) throw ConfigError("loss: rho must have one weight per state dimension");
  for (int i = 0; i < rho.size(); ++i) {
    if (!(rho[i] >= 0.0)) throw ConfigError("loss: rho must be >= 0");
  }
}

std::optional<std::string> LossSpec::iss_warning() const {
  if (lambda > 2.0) return std::nullopt;
  return "lambda = " + std::to_string(lambda) +
         " <= 2: the exponential input-to-state stability bound on the estimation error "
         "requires lambda > 2; training proceeds but the ISS envelope is not applicable";
}

Mat contraction_matrix_from_jacobian(const SystemModel& system, const Vec& x_hat,
                                     const Mat& input_jac, double lambda) {
  const int n = system.n;
  const Mat m = system.jac_f(x_hat) + input_jac.leftCols(n);
  Mat d = 0.5 * (m + m.transpose());
  d.diagonal().array() += 2.0 * lambda;
  return d;
}

ContractionMatrix contraction_matrix(const SystemModel& system, const Mlp& net,
                                     const Vec& x_hat, const Vec& y, double lambda) {
  if (x_hat.size() != system.n || y.size() != system.p)
    throw ShapeError("contraction_matrix: point dimensions do not match the system");
  Vec u(system.n + system.p);
  u << x_hat, y;
  const Mat jac = input_jacobian(net, u);
  return {contraction_matrix_from_jacobian(system, x_hat, jac, lambda), x_hat, y};
}

Vec leading_minors(const Mat& d) {
  if (d.rows() != d.cols()) throw ShapeError("leading_minors: matrix not square");
  const int n = static_cast<int>(d.rows());
  Vec minors(n);
  for (int i = 1; i <= n; ++i) {
    minors[i - 1] = determinant(d.topLeftCorner(i, i));
  }
  return minors;
}

Mat leading_minor_gradient(const Mat& d, int i) {
  const int n = static_cast<int>(d.rows());
  if (i < 1 || i > n) throw PreconditionError("leading_minor_gradient: index out of range");
  Mat grad = Mat::Zero(n, n);
  if (i == 1) {
    grad(0, 0) = 1.0;
    return grad;
  }
  // d(det A)/dA_{rc} is the (r,c) cofactor of the top-left i x i block.
  Mat sub(i - 1, i - 1);
  for (int r = 0; r < i; ++r) {
    for (int c = 0; c < i; ++c) {
      int sr = 0;
      for (int rr = 0; rr < i; ++rr) {
        if (rr == r) continue;
        int sc = 0;
        for (int cc = 0; cc < i; ++cc) {
          if (cc == c) continue;
          sub(sr, sc++) = d(rr, cc);
        }
        ++sr;
      }
      grad(r, c) = (((r + c) % 2) ? -1.0 : 1.0) * determinant(sub);
    }
  }
  return grad;
}

double minor_penalty(const Vec& minors, int i) {
  if (i < 1 || i > minors.size()) throw PreconditionError("minor_penalty: index out of range");
  const double delta = minors[i - 1];
  return (i % 2 == 1) ? std::max(0.0, delta) : std::max(0.0, -delta);
}

double minor_penalty_sum(const Vec& minors, const LossSpec& spec) {
  double sum = 0.0;
  for (int i = 1; i <= minors.size(); ++i) {
    double l = minor_penalty(minors, i);
    if (spec.penalty_form == PenaltyForm::SquaredHinge) l *= l;
    sum += spec.rho[i - 1] * l;
  }
  return sum;
}

double mpdi_loss(const SystemModel& system, const Mlp& net, const CollocationSet& batch,
                 const LossSpec& spec) {
  const int count = batch.size();
  if (count < 1) throw PreconditionError("mpdi_loss: empty batch");
  spec.check(system.n);

  const ForwardCache fwd = forward_cached(net, batch.inputs());
  const JacobianCache jac = input_jacobian_cached(net, fwd);

  double sum = 0.0;
  for (int j = 0; j < count; ++j) {
    const Mat d = contraction_matrix_from_jacobian(system, batch.x.col(j), jac.jacobian(j),
                                                   spec.lambda);
    if (!d.allFinite())
      throw NumericError("mpdi_loss: non-finite contraction matrix at collocation point " +
                             std::to_string(j),
                         j);
    sum += minor_penalty_sum(leading_minors(d), spec);
  }
  return sum / count;
}

double bc_loss(const SystemModel& system, const Mlp& net, const CollocationSet& batch) {
  const int count = batch.size();
  if (count < 1) throw PreconditionError("bc_loss: empty batch");

  Mat on_manifold(system.n + system.p, count);
  for (int j = 0; j < count; ++j) {
    on_manifold.col(j).head(system.n) = batch.x.col(j);
    on_manifold.col(j).tail(system.p) = system.h(batch.x.col(j));
  }
  const Mat out = forward(net, on_manifold);
  if (!out.allFinite()) throw NumericError("bc_loss: non-finite network output");
  return out.colwise().squaredNorm().mean();
}

double total_loss(const SystemModel& system, const Mlp& net, const CollocationSet& batch,
                  const LossSpec& spec) {
  return spec.mu1 * mpdi_loss(system, net, batch, spec) +
         spec.mu2 * bc_loss(system, net, batch);
}

}  // namespace cno
