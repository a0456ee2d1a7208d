#pragma once

#include <Eigen/Dense>

namespace cno {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Largest singular value by power iteration on M^T M, relative tolerance
// `rel_tol`, at most `max_iter` sweeps. Returns 0 for an all-zero matrix.
double spectral_norm(const Mat& m, double rel_tol = 1e-6, int max_iter = 500);

// Determinant: closed form up to 3x3, partially pivoted LU above.
double determinant(const Mat& a);

// Largest eigenvalue of a symmetric matrix. Closed form for 1x1 and 2x2,
// iterative symmetric eigensolver otherwise.
double max_eigenvalue_sym(const Mat& d);

// 2x2 closed form used above, exposed for cross-checks.
double max_eigenvalue_sym2(double a11, double a12, double a22);

}  // namespace cno
