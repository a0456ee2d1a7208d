#include "cno/linalg.hpp"

#include <cmath>

#include "cno/errors.hpp"

namespace cno {

double spectral_norm(const Mat& m, double rel_tol, int max_iter) {
  if (m.size() == 0) return 0.0;
  if (m.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;

  Vec v = Vec::Ones(m.cols()).normalized();
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;  // v landed in the null space
    v = w / nw;
    const double next = std::sqrt(nw);
    if (it > 0 && std::abs(next - sigma) <= rel_tol * next) {
      return next;
    }
    sigma = next;
  }
  return sigma;
}

double determinant(const Mat& a) {
  if (a.rows() != a.cols()) throw ShapeError("determinant: matrix not square");
  switch (a.rows()) {
    case 0:
      return 1.0;
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      return Eigen::PartialPivLU<Mat>(a).determinant();
  }
}

double max_eigenvalue_sym2(double a11, double a12, double a22) {
  const double mean = 0.5 * (a11 + a22);
  const double radius = std::hypot(0.5 * (a11 - a22), a12);
  return mean + radius;
}

double max_eigenvalue_sym(const Mat& d) {
  if (d.rows() != d.cols()) throw ShapeError("max_eigenvalue_sym: matrix not square");
  switch (d.rows()) {
    case 1:
      return d(0, 0);
    case 2:
      return max_eigenvalue_sym2(d(0, 0), 0.5 * (d(0, 1) + d(1, 0)), d(1, 1));
    default: {
      Eigen::SelfAdjointEigenSolver<Mat> solver(d, Eigen::EigenvaluesOnly);
      return solver.eigenvalues().maxCoeff();
    }
  }
}

}  // namespace cno
