#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cno/systems.hpp"

namespace cno {

// Collocation points for the physics loss: N pairs (x_hat, y) stored as
// columns. x_hat and y are sampled independently, so pairs generally lie off
// the output manifold y = h(x_hat).
struct CollocationSet {
  Mat x;  // n x N
  Mat y;  // p x N
  std::uint64_t seed = 0;
  Box domain_x;
  Box domain_y;

  int size() const { return static_cast<int>(x.cols()); }
  // Stacked input column [x; y] for the network, (n+p) x N.
  Mat inputs() const;
};

// n_points i.i.d. uniform draws over domain_x x domain_y. Deterministic for
// a given seed. Throws ConfigError for an invalid box, PreconditionError for
// n_points < 1.
CollocationSet sample_collocation(const SystemModel& system, int n_points,
                                  std::uint64_t seed);

// Shuffled partition into batches of batch_size (last batch may be short).
// Deterministic for a given seed; the union of the batches is the set.
std::vector<CollocationSet> batches(const CollocationSet& set, int batch_size,
                                    std::uint64_t seed);

// One row per point: x coordinates then y coordinates, tab separated.
void export_points(const CollocationSet& set, std::ostream& out);

}  // namespace cno
