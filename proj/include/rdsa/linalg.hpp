#pragma once

#include <Eigen/Core>

namespace rdsa {

struct EigenSym {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, orthonormal
};

// (M + M') / 2. Throws ConfigError if M is not square.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m);

// Full symmetric eigendecomposition. Throws NumericalError if the solver
// fails or the reconstruction V diag(w) V' drifts from the input by more
// than 1e-8 * max|M_ij|.
EigenSym eigen_sym(const Eigen::MatrixXd& m);

// Eigenvalue map lambda -> max(lambda, 0) + floor, reassembled. Output is
// symmetric positive definite with min eigenvalue >= floor for floor > 0.
Eigen::MatrixXd project_pd(const Eigen::MatrixXd& m, double floor);

// Solve M x = v for symmetric positive definite M via Cholesky. Throws
// NumericalError when the factorization fails.
Eigen::VectorXd solve_pd(const Eigen::MatrixXd& m, const Eigen::VectorXd& v);

// One step of the running mean over per-iteration Hessian estimates with
// initial estimate I at n = 0:
//   Hbar_n = (n / (n + 1)) Hbar_{n-1} + (1 / (n + 1)) Hhat_n,  n >= 1.
Eigen::MatrixXd smooth_hessian(const Eigen::MatrixXd& hbar_prev,
                               const Eigen::MatrixXd& hhat, long n);

}  // namespace rdsa
