#include "cno/optimize.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "cno/errors.hpp"
#include "cno/sampling.hpp"

namespace cno {

void TrainConfig::check() const {
  if (adam_epochs < 0 || lbfgs_epochs < 0)
    throw ConfigError("train: epoch counts must be >= 0");
  if (!(alpha > 0.0)) throw ConfigError("train: alpha must be > 0");
  if (!(beta > 0.0)) throw ConfigError("train: beta must be > 0");
  if (lbfgs_history < 1) throw ConfigError("train: lbfgs_history must be >= 1");
  if (batch_size < 0) throw ConfigError("train: batch_size must be >= 0");
  if (checkpoint_every < 0) throw ConfigError("train: checkpoint_every must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ConfigError("train: adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("train: adam_eps must be > 0");
  if (grad_clip < 0.0) throw ConfigError("train: grad_clip must be >= 0");
}

void adam_step(AdamState& state, Vec& params, const Vec& grad, double alpha, double beta1,
               double beta2, double eps) {
  if (state.m.size() != params.size()) state.reset(params.size());
  if (grad.size() != params.size())
    throw ShapeError("adam_step: gradient length does not match parameters");
  if (!grad.allFinite()) throw NumericError("adam_step: non-finite gradient");

  state.t += 1;
  state.m = beta1 * state.m + (1.0 - beta1) * grad;
  state.v = beta2 * state.v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  params.array() -=
      alpha * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + eps);
}

namespace {

// Two-loop recursion: approximate inverse-Hessian product -H g.
Vec lbfgs_direction(const LbfgsState& state, const Vec& grad) {
  Vec q = grad;
  const int m = static_cast<int>(state.pairs.size());
  std::vector<double> alpha(m), rho(m);
  for (int i = m - 1; i >= 0; --i) {
    const auto& [s, y] = state.pairs[i];
    rho[i] = 1.0 / s.dot(y);
    alpha[i] = rho[i] * s.dot(q);
    q -= alpha[i] * y;
  }
  if (m > 0) {
    const auto& [s, y] = state.pairs.back();
    q *= s.dot(y) / y.squaredNorm();  // standard initial scaling
  }
  for (int i = 0; i < m; ++i) {
    const auto& [s, y] = state.pairs[i];
    const double b = rho[i] * y.dot(q);
    q += (alpha[i] - b) * s;
  }
  return -q;
}

}  // namespace

LbfgsStepReport lbfgs_step(LbfgsState& state, Vec& params, const Objective& objective,
                           double beta) {
  LbfgsStepReport report;

  Vec grad(params.size());
  const double f0 = objective(params, &grad);
  report.evaluations = 1;
  report.grad_norm = grad.norm();
  report.loss = f0;
  if (!std::isfinite(f0) || !grad.allFinite())
    throw NumericError("lbfgs_step: non-finite loss or gradient");

  // Curvature pair from the previous accepted iterate.
  if (state.has_prev) {
    Vec s = params - state.prev_x;
    Vec y = grad - state.prev_grad;
    if (s.dot(y) > 1e-10) {
      state.pairs.emplace_back(std::move(s), std::move(y));
      while (static_cast<int>(state.pairs.size()) > state.history) state.pairs.pop_front();
    }
  }

  Vec direction = lbfgs_direction(state, grad);
  double slope = grad.dot(direction);
  if (slope >= 0.0) {
    // Not a descent direction (stale curvature); fall back to steepest descent.
    state.pairs.clear();
    direction = -grad;
    slope = -grad.squaredNorm();
  }

  constexpr double armijo_c = 1e-4;
  constexpr int max_halvings = 25;
  double step = beta;
  for (int trial = 0; trial < max_halvings; ++trial) {
    Vec candidate = params + step * direction;
    const double f = objective(candidate, nullptr);
    ++report.evaluations;
    if (std::isfinite(f) && f <= f0 + armijo_c * step * slope) {
      state.prev_x = params;
      state.prev_grad = grad;
      state.has_prev = true;
      params = std::move(candidate);
      report.accepted = true;
      report.step = step;
      report.loss = f;
      return report;
    }
    step *= 0.5;
  }

  // Line search exhausted: keep the iterate, drop the (evidently bad) model.
  state.reset();
  report.history_reset = true;
  return report;
}

void export_train_record(const TrainRecord& record, std::ostream& out,
                         const std::string& header_comment) {
  if (!header_comment.empty()) out << header_comment;
  out << "epoch\tphase\ttotal\tmpdi\tbc\tgrad_norm\tseconds\n";
  out.precision(17);
  for (const auto& e : record.epochs) {
    out << e.epoch << "\t" << (e.phase == 'a' ? "adam" : "lbfgs") << "\t" << e.total << "\t"
        << e.mpdi << "\t" << e.bc << "\t" << e.grad_norm << "\t" << e.seconds << "\n";
  }
}

std::pair<Mlp, TrainRecord> train(const SystemModel& system, Mlp net,
                                  const CollocationSet& data, const LossSpec& spec,
                                  const TrainConfig& config,
                                  const CheckpointHook& checkpoint_hook) {
  config.check();
  spec.check(system.n);
  net.check_shape();
  using clock = std::chrono::steady_clock;

  TrainRecord record;
  record.initial_total = loss_value(system, net, data, spec).total;

  Vec params = pack(net);
  AdamState adam;
  adam.reset(params.size());

  const int full = data.size();
  const int batch_size = (config.batch_size == 0) ? full : std::min(config.batch_size, full);
  int epoch = 0;

  const auto maybe_checkpoint = [&](const Mlp& current) {
    if (checkpoint_hook && config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0)
      checkpoint_hook(epoch, current);
  };

  // Phase 1: Adam over shuffled minibatches.
  for (int e = 0; e < config.adam_epochs; ++e) {
    const auto t0 = clock::now();
    // One shuffle per epoch, seeded deterministically.
    const auto parts = batches(data, batch_size, config.seed + static_cast<std::uint64_t>(e));
    double total = 0.0, mpdi = 0.0, bc = 0.0, gnorm = 0.0;
    for (const auto& part : parts) {
      unpack(params, net);
      LossGradient lg = loss_gradient(system, net, part, spec);
      if (config.grad_clip > 0.0) {
        const double norm = lg.grad.norm();
        if (norm > config.grad_clip) lg.grad *= config.grad_clip / norm;
      }
      adam_step(adam, params, lg.grad, config.alpha, config.adam_beta1, config.adam_beta2,
                config.adam_eps);
      total += lg.value.total;
      mpdi += lg.value.mpdi;
      bc += lg.value.bc;
      gnorm = lg.grad.norm();
    }
    unpack(params, net);
    const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
    const double scale = 1.0 / static_cast<double>(parts.size());
    ++epoch;
    record.epochs.push_back(
        {epoch, 'a', total * scale, mpdi * scale, bc * scale, gnorm, seconds});
    maybe_checkpoint(net);
  }

  // Phase 2: full-batch L-BFGS.
  LbfgsState lbfgs;
  lbfgs.history = config.lbfgs_history;
  LossValue last_eval;  // value at the most recent objective call
  const Objective objective = [&](const Vec& x, Vec* grad) -> double {
    unpack(x, net);
    if (grad == nullptr) {
      last_eval = loss_value(system, net, data, spec);
      return last_eval.total;
    }
    LossGradient lg = loss_gradient(system, net, data, spec);
    last_eval = lg.value;
    *grad = std::move(lg.grad);
    return lg.value.total;
  };

  for (int e = 0; e < config.lbfgs_epochs; ++e) {
    const auto t0 = clock::now();
    const LbfgsStepReport step = lbfgs_step(lbfgs, params, objective, config.beta);
    if (step.history_reset) ++record.line_search_failures;
    unpack(params, net);
    // On acceptance the last objective call was at the new iterate; only a
    // rejected step needs a fresh evaluation for the record.
    const LossValue value = step.accepted ? last_eval : loss_value(system, net, data, spec);
    const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
    ++epoch;
    record.epochs.push_back(
        {epoch, 'l', value.total, value.mpdi, value.bc, step.grad_norm, seconds});
    maybe_checkpoint(net);
  }

  unpack(params, net);
  if (!pack(net).allFinite()) throw NumericError("train: non-finite parameters");
  record.final_total = loss_value(system, net, data, spec).total;
  return {std::move(net), std::move(record)};
}

}  // namespace cno
