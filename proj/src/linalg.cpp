#include "rdsa/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "rdsa/errors.hpp"

namespace rdsa {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw ConfigError("symmetrize requires a square matrix");
  return 0.5 * (m + m.transpose());
}

EigenSym eigen_sym(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd s = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigendecomposition failed");
  EigenSym out{solver.eigenvalues(), solver.eigenvectors()};
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double err =
      (out.vectors * out.values.asDiagonal() * out.vectors.transpose() - s)
          .cwiseAbs()
          .maxCoeff();
  if (!(err <= 1e-8 * scale))
    throw NumericalError("eigendecomposition reconstruction check failed");
  return out;
}

Eigen::MatrixXd project_pd(const Eigen::MatrixXd& m, double floor) {
  if (!(floor >= 0.0) || !std::isfinite(floor))
    throw ConfigError("project_pd requires floor >= 0");
  EigenSym e = eigen_sym(m);
  Eigen::VectorXd w = e.values.cwiseMax(0.0).array() + floor;
  return e.vectors * w.asDiagonal() * e.vectors.transpose();
}

Eigen::VectorXd solve_pd(const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  if (m.rows() != m.cols() || m.rows() != v.size())
    throw ConfigError("solve_pd dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError("Cholesky factorization failed; matrix not PD");
  return llt.solve(v);
}

Eigen::MatrixXd smooth_hessian(const Eigen::MatrixXd& hbar_prev,
                               const Eigen::MatrixXd& hhat, long n) {
  if (n < 1) throw ConfigError("smooth_hessian requires n >= 1");
  if (hbar_prev.rows() != hhat.rows() || hbar_prev.cols() != hhat.cols())
    throw ConfigError("smooth_hessian dimension mismatch");
  const double w = 1.0 / static_cast<double>(n + 1);
  return (1.0 - w) * hbar_prev + w * hhat;
}

}  // namespace rdsa
