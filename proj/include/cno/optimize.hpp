#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "cno/gradient.hpp"

namespace cno {

// Objective callable: returns the loss at x; when grad is non-null, also
// writes the gradient there.
using Objective = std::function<double(const Vec& x, Vec* grad)>;

struct TrainConfig {
  int adam_epochs = 500;
  int lbfgs_epochs = 500;
  double alpha = 1e-3;  // Adam learning rate
  double beta = 1.0;    // initial L-BFGS trial step
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int lbfgs_history = 10;
  int batch_size = 0;  // Adam minibatch size; 0 = full batch
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // epochs between checkpoints; 0 = off
  double grad_clip = 0.0;    // max gradient norm; 0 = off

  void check() const;
};

// --- Adam -----------------------------------------------------------------

struct AdamState {
  Vec m, v;
  long t = 0;

  void reset(long dim) {
    m = Vec::Zero(dim);
    v = Vec::Zero(dim);
    t = 0;
  }
};

// One bias-corrected Adam update in place.
void adam_step(AdamState& state, Vec& params, const Vec& grad, double alpha,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// --- L-BFGS ---------------------------------------------------------------

struct LbfgsState {
  int history = 10;
  std::deque<std::pair<Vec, Vec>> pairs;  // (s, y) curvature pairs, oldest first
  Vec prev_x, prev_grad;
  bool has_prev = false;

  void reset() {
    pairs.clear();
    has_prev = false;
  }
};

struct LbfgsStepReport {
  bool accepted = false;
  bool history_reset = false;
  double step = 0.0;
  double loss = 0.0;       // loss at the new (or unchanged) iterate
  double grad_norm = 0.0;  // gradient norm at the point the step started from
  int evaluations = 0;
};

// One L-BFGS iteration: two-loop-recursion direction from the stored
// curvature pairs, Armijo backtracking line search with initial trial step
// `beta` and at most 25 halvings. A failed line search rejects the step and
// resets the history (reported, not fatal). Curvature pairs with
// s.y <= 1e-10 are skipped.
LbfgsStepReport lbfgs_step(LbfgsState& state, Vec& params, const Objective& objective,
                           double beta);

// --- training driver --------------------------------------------------------

struct EpochRecord {
  int epoch = 0;
  char phase = 'a';  // 'a' Adam, 'l' L-BFGS
  double total = 0.0;
  double mpdi = 0.0;
  double bc = 0.0;
  double grad_norm = 0.0;
  double seconds = 0.0;
};

struct TrainRecord {
  std::vector<EpochRecord> epochs;
  double initial_total = 0.0;
  double final_total = 0.0;
  int line_search_failures = 0;
};

void export_train_record(const TrainRecord& record, std::ostream& out,
                         const std::string& header_comment = "");

// Writes a checkpoint of the current network every checkpoint_every epochs;
// receives the epoch number. Optional.
using CheckpointHook = std::function<void(int epoch, const Mlp& net)>;

// Two-phase training: adam_epochs epochs of Adam over shuffled minibatches
// (full batch when batch_size == 0), then lbfgs_epochs full-batch L-BFGS
// iterations. Deterministic for a given config and seed. Returns the trained
// network and the per-epoch loss history.
std::pair<Mlp, TrainRecord> train(const SystemModel& system, Mlp net,
                                  const CollocationSet& data, const LossSpec& spec,
                                  const TrainConfig& config,
                                  const CheckpointHook& checkpoint_hook = nullptr);

}  // namespace cno
