#include "rdsa/estimators.hpp"

#include <cmath>

#include "rdsa/errors.hpp"

namespace rdsa {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConfigError("estimator requires delta > 0");
}

void check_nonzero(const Eigen::VectorXd& d) {
  for (int i = 0; i < d.size(); ++i)
    if (d[i] == 0.0)
      throw ConfigError("SPSA direction has a zero coordinate");
}

}  // namespace

GradEstimate grad_rdsa_unif(double y_plus, double y_minus,
                            const Eigen::VectorXd& d, double delta,
                            double eta) {
  check_delta(delta);
  if (!(eta > 0.0)) throw ConfigError("grad_rdsa_unif requires eta > 0");
  const double c = 3.0 / (eta * eta) * (y_plus - y_minus) / (2.0 * delta);
  return {c * d, 2};
}

GradEstimate grad_rdsa_asymber(double y_plus, double y_minus,
                               const Eigen::VectorXd& d, double delta,
                               double eps) {
  check_delta(delta);
  if (!(eps > 0.0)) throw ConfigError("grad_rdsa_asymber requires eps > 0");
  const double c = (y_plus - y_minus) / (2.0 * delta * (1.0 + eps));
  return {c * d, 2};
}

GradEstimate grad_rdsa_gauss(double y_plus, double y_minus,
                             const Eigen::VectorXd& d, double delta) {
  check_delta(delta);
  const double c = (y_plus - y_minus) / (2.0 * delta);
  return {c * d, 2};
}

GradEstimate grad_spsa(double y_plus, double y_minus,
                       const Eigen::VectorXd& delta_dir, double delta) {
  check_delta(delta);
  check_nonzero(delta_dir);
  const double c = (y_plus - y_minus) / (2.0 * delta);
  return {c * delta_dir.cwiseInverse(), 2};
}

HessEstimate hess_rdsa_unif(double y_center, double y_plus, double y_minus,
                            const Eigen::VectorXd& d, double delta,
                            double eta) {
  check_delta(delta);
  if (!(eta > 0.0)) throw ConfigError("hess_rdsa_unif requires eta > 0");
  const int n = static_cast<int>(d.size());
  const double e2 = eta * eta;
  const double s = (y_plus + y_minus - 2.0 * y_center) / (delta * delta);
  const double scale = 9.0 / (2.0 * e2 * e2);
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = scale * s * 2.5 * (d[i] * d[i] - e2 / 3.0);
    for (int j = i + 1; j < n; ++j) {
      const double v = scale * s * d[i] * d[j];
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return {h, 3};
}

HessEstimate hess_rdsa_asymber(double y_center, double y_plus, double y_minus,
                               const Eigen::VectorXd& d, double delta,
                               double eps) {
  check_delta(delta);
  if (!(eps > 0.0)) throw ConfigError("hess_rdsa_asymber requires eps > 0");
  const int n = static_cast<int>(d.size());
  const double q = 1.0 + eps;
  const double phi = q * (1.0 + q * q * q) / (2.0 + eps);  // E[d^4]
  const double kappa = phi - q * q;
  const double s = (y_plus + y_minus - 2.0 * y_center) / (delta * delta);
  const double off = 1.0 / (2.0 * q * q);
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = s * (d[i] * d[i] - q) / kappa;
    for (int j = i + 1; j < n; ++j) {
      const double v = s * off * d[i] * d[j];
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return {h, 3};
}

std::pair<GradEstimate, HessEstimate> hess_2spsa(
    double y_plus, double y_plus_tilde, double y_minus, double y_minus_tilde,
    const Eigen::VectorXd& delta_dir, const Eigen::VectorXd& delta_dir_tilde,
    double delta, double delta_tilde) {
  check_delta(delta);
  check_delta(delta_tilde);
  check_nonzero(delta_dir);
  check_nonzero(delta_dir_tilde);
  const int n = static_cast<int>(delta_dir.size());

  // Per-coordinate difference of the two one-sided gradient probes.
  Eigen::VectorXd dg(n);
  const double num = (y_plus_tilde - y_plus) - (y_minus_tilde - y_minus);
  for (int i = 0; i < n; ++i) dg[i] = num / (delta_tilde * delta_dir_tilde[i]);

  const Eigen::VectorXd inv = delta_dir.cwiseInverse();
  Eigen::MatrixXd outer = (dg / (2.0 * delta)) * inv.transpose();
  Eigen::MatrixXd h = 0.5 * (outer + outer.transpose());

  GradEstimate g = grad_spsa(y_plus, y_minus, delta_dir, delta);
  g.measurements_used = 4;
  return {g, HessEstimate{h, 4}};
}

}  // namespace rdsa
