#pragma once

#include <Eigen/Core>
#include <utility>

namespace rdsa {

// Single-iteration gradient and Hessian estimates built from two to four
// noisy measurements. These are pure functions of the measurements and the
// sampled direction; the caller owns measurement bookkeeping and schedules.
// All throw ConfigError on delta <= 0, non-positive distribution parameters,
// or (SPSA) a zero direction coordinate.

struct GradEstimate {
  Eigen::VectorXd g;
  int measurements_used;
};

struct HessEstimate {
  Eigen::MatrixXd h;
  int measurements_used;
};

// y_plus = y(x + delta d), y_minus = y(x - delta d), d ~ Uniform[-eta, eta].
// g = (3 / eta^2) d (y_plus - y_minus) / (2 delta).
GradEstimate grad_rdsa_unif(double y_plus, double y_minus,
                            const Eigen::VectorXd& d, double delta,
                            double eta);

// d from the asymmetric Bernoulli distribution with parameter eps.
// g = d (y_plus - y_minus) / (2 delta (1 + eps)).
GradEstimate grad_rdsa_asymber(double y_plus, double y_minus,
                               const Eigen::VectorXd& d, double delta,
                               double eps);

// d ~ N(0, I). g = d (y_plus - y_minus) / (2 delta).
GradEstimate grad_rdsa_gauss(double y_plus, double y_minus,
                             const Eigen::VectorXd& d, double delta);

// Classic simultaneous-perturbation estimate with per-coordinate inversion:
// g_i = (y_plus - y_minus) / (2 delta Delta_i).
GradEstimate grad_spsa(double y_plus, double y_minus,
                       const Eigen::VectorXd& delta_dir, double delta);

// Three-measurement Hessian estimates. s = (y_plus + y_minus - 2 y_center)
// / delta^2 approximates d'H d; the matrix weight M(d) unwinds the moment
// structure of the chosen distribution so that E[M s] = H for quadratics.
HessEstimate hess_rdsa_unif(double y_center, double y_plus, double y_minus,
                            const Eigen::VectorXd& d, double delta,
                            double eta);

HessEstimate hess_rdsa_asymber(double y_center, double y_plus, double y_minus,
                               const Eigen::VectorXd& d, double delta,
                               double eps);

// Four-measurement estimate: one-sided gradient differences at x + delta
// Delta and x - delta Delta, each probed with the secondary direction
// delta_t Delta_t. Returns the symmetrized Hessian estimate together with
// the standard two-point gradient estimate reusing y_plus and y_minus.
std::pair<GradEstimate, HessEstimate> hess_2spsa(
    double y_plus, double y_plus_tilde, double y_minus, double y_minus_tilde,
    const Eigen::VectorXd& delta_dir, const Eigen::VectorXd& delta_dir_tilde,
    double delta, double delta_tilde);

}  // namespace rdsa
