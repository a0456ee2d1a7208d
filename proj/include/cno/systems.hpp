#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cno/linalg.hpp"

namespace cno {

// Axis-aligned box, one closed interval per coordinate.
struct Box {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& v, double slack = 0.0) const;
  // Euclidean length of the box diagonal.
  double diameter() const { return (hi - lo).norm(); }
  void check() const;  // throws ConfigError on hi < lo or dim mismatch
};

Box make_box(std::initializer_list<std::pair<double, double>> intervals);

// A plant: state dynamics, analytic Jacobian, output map and the domain the
// observer is meant to operate on. Immutable after construction; all maps
// must be pure.
struct SystemModel {
  std::string name;
  int n = 0;  // state dimension
  int p = 0;  // output dimension
  std::function<Vec(const Vec&)> f;      // vector field
  std::function<Mat(const Vec&)> jac_f;  // df/dx, analytic
  std::function<Vec(const Vec&)> h;      // output map
  Box domain_x;
  Box domain_y;

  void check() const;  // dimensions and callables present
};

SystemModel vanderpol();
SystemModel reverse_duffing();

// Built-in systems by name ("vanderpol", "reverse_duffing").
SystemModel make_system(const std::string& name);
std::vector<std::string> builtin_system_names();

// Finite-difference check of jac_f on random domain points. Mismatches are
// reported, not thrown.
struct JacobianCheckReport {
  int samples = 0;
  double max_rel_error = 0.0;
  Vec worst_point;
  bool passed(double tol = 1e-6) const { return max_rel_error < tol; }
};

JacobianCheckReport validate(const SystemModel& model, int samples, std::uint64_t seed);

}  // namespace cno
