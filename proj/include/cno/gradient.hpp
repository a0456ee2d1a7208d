#pragma once

#include "cno/loss.hpp"

namespace cno {

struct LossValue {
  double total = 0.0;
  double mpdi = 0.0;
  double bc = 0.0;
};

struct LossGradient {
  LossValue value;
  Vec grad;  // packed parameter layout, see pack()
};

// Total loss evaluated in one batched pass (used by line searches, where the
// gradient is not needed).
LossValue loss_value(const SystemModel& system, const Mlp& net, const CollocationSet& batch,
                     const LossSpec& spec);

// Parameter gradient of the total loss. The mpdi term depends on the
// network through its input-Jacobian, so this differentiates the analytic
// Jacobian accumulation in reverse (a mixed second derivative); the bc term
// is ordinary backpropagation at the on-manifold inputs (x, h(x)).
LossGradient loss_gradient(const SystemModel& system, const Mlp& net,
                           const CollocationSet& batch, const LossSpec& spec);

}  // namespace cno
