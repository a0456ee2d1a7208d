#include "cno/systems.hpp"

#include <cmath>

#include "cno/errors.hpp"
#include "cno/rng.hpp"

namespace cno {

bool Box::contains(const Vec& v, double slack) const {
  if (v.size() != lo.size()) return false;
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] < lo[i] - slack || v[i] > hi[i] + slack) return false;
  }
  return true;
}

void Box::check() const {
  if (lo.size() != hi.size()) throw ConfigError("box: lo/hi dimension mismatch");
  if (lo.size() == 0) throw ConfigError("box: empty");
  for (int i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw ConfigError("box: lo > hi on axis " + std::to_string(i));
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw ConfigError("box: non-finite bound on axis " + std::to_string(i));
  }
}

Box make_box(std::initializer_list<std::pair<double, double>> intervals) {
  Box b;
  b.lo.resize(static_cast<long>(intervals.size()));
  b.hi.resize(static_cast<long>(intervals.size()));
  int i = 0;
  for (const auto& [lo, hi] : intervals) {
    b.lo[i] = lo;
    b.hi[i] = hi;
    ++i;
  }
  b.check();
  return b;
}

void SystemModel::check() const {
  if (n < 1 || p < 1) throw ConfigError("system '" + name + "': n and p must be >= 1");
  if (!f || !jac_f || !h) throw ConfigError("system '" + name + "': missing f, jac_f or h");
  domain_x.check();
  domain_y.check();
  if (domain_x.dim() != n) throw ConfigError("system '" + name + "': domain_x dimension != n");
  if (domain_y.dim() != p) throw ConfigError("system '" + name + "': domain_y dimension != p");
}

SystemModel vanderpol() {
  SystemModel s;
  s.name = "vanderpol";
  s.n = 2;
  s.p = 1;
  s.f = [](const Vec& x) {
    Vec dx(2);
    dx[0] = x[1];
    dx[1] = -x[0] + x[1] * (1.0 - x[0] * x[0]);
    return dx;
  };
  s.jac_f = [](const Vec& x) {
    Mat j(2, 2);
    j(0, 0) = 0.0;
    j(0, 1) = 1.0;
    j(1, 0) = -1.0 - 2.0 * x[0] * x[1];
    j(1, 1) = 1.0 - x[0] * x[0];
    return j;
  };
  s.h = [](const Vec& x) { return Vec::Constant(1, x[0]); };
  s.domain_x = make_box({{-2.0, 2.0}, {-3.0, 3.0}});
  s.domain_y = make_box({{-2.0, 2.0}});
  return s;
}

SystemModel reverse_duffing() {
  SystemModel s;
  s.name = "reverse_duffing";
  s.n = 2;
  s.p = 1;
  s.f = [](const Vec& x) {
    Vec dx(2);
    dx[0] = x[1] * x[1] * x[1];
    dx[1] = -x[0];
    return dx;
  };
  s.jac_f = [](const Vec& x) {
    Mat j(2, 2);
    j(0, 0) = 0.0;
    j(0, 1) = 3.0 * x[1] * x[1];
    j(1, 0) = -1.0;
    j(1, 1) = 0.0;
    return j;
  };
  s.h = [](const Vec& x) { return Vec::Constant(1, x[0]); };
  s.domain_x = make_box({{-1.0, 1.0}, {-1.0, 1.0}});
  s.domain_y = make_box({{-1.0, 1.0}});
  return s;
}

SystemModel make_system(const std::string& name) {
  if (name == "vanderpol") return vanderpol();
  if (name == "reverse_duffing") return reverse_duffing();
  throw ConfigError("unknown system '" + name + "' (built-in: vanderpol, reverse_duffing)");
}

std::vector<std::string> builtin_system_names() { return {"vanderpol", "reverse_duffing"}; }

JacobianCheckReport validate(const SystemModel& model, int samples, std::uint64_t seed) {
  model.check();
  if (samples < 1) throw PreconditionError("validate: samples must be >= 1");

  JacobianCheckReport report;
  report.samples = samples;
  report.worst_point = Vec::Zero(model.n);

  Rng rng(seed);
  const double step = 1e-6;
  for (int s = 0; s < samples; ++s) {
    Vec x(model.n);
    for (int i = 0; i < model.n; ++i) {
      x[i] = rng.uniform(model.domain_x.lo[i], model.domain_x.hi[i]);
    }
    const Mat analytic = model.jac_f(x);
    Mat fd(model.n, model.n);
    for (int j = 0; j < model.n; ++j) {
      Vec xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      fd.col(j) = (model.f(xp) - model.f(xm)) / (2.0 * step);
    }
    const double scale = std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
    const double rel = (analytic - fd).lpNorm<Eigen::Infinity>() / scale;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_point = x;
    }
  }
  return report;
}

}  // namespace cno
