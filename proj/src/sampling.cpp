#include "cno/sampling.hpp"

#include <cassert>
#include <numeric>
#include <ostream>

#include "cno/errors.hpp"
#include "cno/rng.hpp"

namespace cno {

Mat CollocationSet::inputs() const {
  Mat u(x.rows() + y.rows(), x.cols());
  u.topRows(x.rows()) = x;
  u.bottomRows(y.rows()) = y;
  return u;
}

CollocationSet sample_collocation(const SystemModel& system, int n_points,
                                  std::uint64_t seed) {
  if (n_points < 1) throw PreconditionError("sample_collocation: n_points must be >= 1");
  system.domain_x.check();
  system.domain_y.check();

  CollocationSet set;
  set.seed = seed;
  set.domain_x = system.domain_x;
  set.domain_y = system.domain_y;
  set.x.resize(system.n, n_points);
  set.y.resize(system.p, n_points);

  Rng rng(seed);
  for (int j = 0; j < n_points; ++j) {
    for (int i = 0; i < system.n; ++i) {
      set.x(i, j) = rng.uniform(system.domain_x.lo[i], system.domain_x.hi[i]);
    }
    for (int i = 0; i < system.p; ++i) {
      set.y(i, j) = rng.uniform(system.domain_y.lo[i], system.domain_y.hi[i]);
    }
    assert(set.domain_x.contains(set.x.col(j)));
    assert(set.domain_y.contains(set.y.col(j)));
  }
  return set;
}

std::vector<CollocationSet> batches(const CollocationSet& set, int batch_size,
                                    std::uint64_t seed) {
  const int n_points = set.size();
  if (batch_size < 1 || batch_size > n_points)
    throw PreconditionError("batches: batch_size must be in [1, N]");

  std::vector<int> order(n_points);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n_points - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.integer(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }

  std::vector<CollocationSet> out;
  for (int start = 0; start < n_points; start += batch_size) {
    const int count = std::min(batch_size, n_points - start);
    CollocationSet b;
    b.seed = seed;
    b.domain_x = set.domain_x;
    b.domain_y = set.domain_y;
    b.x.resize(set.x.rows(), count);
    b.y.resize(set.y.rows(), count);
    for (int k = 0; k < count; ++k) {
      b.x.col(k) = set.x.col(order[start + k]);
      b.y.col(k) = set.y.col(order[start + k]);
    }
    out.push_back(std::move(b));
  }
  return out;
}

void export_points(const CollocationSet& set, std::ostream& out) {
  out << "#";
  for (int i = 0; i < set.x.rows(); ++i) out << " x" << i + 1;
  for (int i = 0; i < set.y.rows(); ++i) out << " y" << i + 1;
  out << "\n";
  out.precision(17);
  for (int j = 0; j < set.size(); ++j) {
    for (int i = 0; i < set.x.rows(); ++i) {
      out << (i ? "\t" : "") << set.x(i, j);
    }
    for (int i = 0; i < set.y.rows(); ++i) {
      out << "\t" << set.y(i, j);
    }
    out << "\n";
  }
}

}  // namespace cno
