#pragma once

#include <optional>
#include <string>

#include "cno/mlp.hpp"
#include "cno/sampling.hpp"
#include "cno/systems.hpp"

namespace cno {

enum class PenaltyForm { Hinge, SquaredHinge };

std::string penalty_form_name(PenaltyForm f);
PenaltyForm penalty_form_from_name(const std::string& name);

// Weights of the physics loss: total = mu1 * mpdi + mu2 * bc, with per-minor
// weights rho inside the mpdi term.
struct LossSpec {
  double lambda = 2.5;
  double mu1 = 1.0;
  double mu2 = 1.0;
  Vec rho;
  PenaltyForm penalty_form = PenaltyForm::Hinge;

  void check(int n) const;  // throws ConfigError on bad weights/dimensions
  // The exponential ISS guarantee needs lambda > 2; returns a warning
  // message when that fails. Not an error: training itself is unaffected.
  std::optional<std::string> iss_warning() const;
};

struct ContractionMatrix {
  Mat d;
  Vec x_hat;
  Vec y;
};

// D(x,y) = He{jac_f(x) + dk/dx(x,y)} + 2 lambda I, the matrix whose negative
// semidefiniteness over the domain certifies the observer contracts at rate
// lambda. dk/dx is the leading n x n block of the network input-Jacobian.
ContractionMatrix contraction_matrix(const SystemModel& system, const Mlp& net,
                                     const Vec& x_hat, const Vec& y, double lambda);

// Same, given a precomputed input-Jacobian (n x (n+p)) for (x_hat, y).
Mat contraction_matrix_from_jacobian(const SystemModel& system, const Vec& x_hat,
                                     const Mat& input_jac, double lambda);

// Leading principal minors det(D[0..i, 0..i]), i = 1..n.
Vec leading_minors(const Mat& d);

// Gradient of the i-th leading minor with respect to the matrix entries
// (cofactors of the top-left i x i block, zero outside it). 1-based i.
Mat leading_minor_gradient(const Mat& d, int i);

// Hinge on the Sylvester sign pattern (-1)^i minor_i >= 0:
// odd i penalizes max(0, minor), even i penalizes max(0, -minor). 1-based i.
double minor_penalty(const Vec& minors, int i);

// Per-point weighted minor penalty sum_i rho_i l_i (squared-hinge squares
// l_i before weighting).
double minor_penalty_sum(const Vec& minors, const LossSpec& spec);

// Mean over the batch of the weighted minor penalties of D.
double mpdi_loss(const SystemModel& system, const Mlp& net, const CollocationSet& batch,
                 const LossSpec& spec);

// Mean over the batch of ||k(x, h(x))||^2: the gain must vanish when the
// network's output argument equals the model output of its state argument.
double bc_loss(const SystemModel& system, const Mlp& net, const CollocationSet& batch);

double total_loss(const SystemModel& system, const Mlp& net, const CollocationSet& batch,
                  const LossSpec& spec);

}  // namespace cno
