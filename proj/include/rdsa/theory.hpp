#pragma once

#include <Eigen/Core>
#include <array>

#include "rdsa/objectives.hpp"
#include "rdsa/perturbation.hpp"

namespace rdsa {

// Closed-form asymptotic-rate quantities for the normalized iterate
// n^{beta/2}(x_n - x*), so the analytical comparisons between the
// algorithm variants are executable rather than prose.
//
// Conventions: a_n = a0/n^alpha (first-order AMSE uses the alpha = 1 form
// with a stability offset absorbed into a0), delta_n = delta0/n^gamma,
// beta = alpha - 2 gamma, and beta+ = beta when alpha = 1 else 0. The bias
// term of the plain first-order variants is active only in the critical
// case gamma = alpha/6; the averaged and second-order forms are evaluated
// as printed closed forms with both terms.
struct AsymptoticInputs {
  Eigen::MatrixXd hessian_at_opt;          // PD
  Eigen::VectorXd third_deriv_contraction; // T, see third_deriv_T
  double noise_variance = 0.0;             // sigma^2
  double a0 = 1.0;
  double delta0 = 1.0;
  double alpha = 1.0;
  double gamma = 1.0 / 6.0;
  double eps = 0.01;  // asymmetric Bernoulli parameter where applicable

  double beta() const { return alpha - 2.0 * gamma; }
  double beta_plus() const { return alpha == 1.0 ? beta() : 0.0; }
};

enum class AmseVariant {
  OneRDSAUnif,
  OneRDSAAsymBer,
  OneRDSAUnifAvg,
  TwoRDSAUnif,
  TwoRDSAAsymBer,
  TwoSPSA,
};

// Bias constants of the asymptotic-normality limits. The uniform value
// 18/5 is exact; the asymmetric Bernoulli value equals twice the
// distribution's m4/m2^2.
double k_mu_unif();
double k_mu_asymber(double eps);

// m4 / m2^2 for any perturbation distribution (1.000099 for the
// asymmetric Bernoulli at eps = 0.01).
double fourth_moment_ratio(const PerturbationDist& dist);

// Asymptotic mean square error of the chosen variant. Throws ConfigError on
// a non-PD Hessian, beta outside (0, 2/3], or a stability constant too
// small for the variance term to be finite.
double amse(AmseVariant variant, const AsymptoticInputs& in);

// The shared problem-dependent quantities (A) and (B) of the second-order
// comparisons, evaluated at a0 = 1:
//   A = (2 delta0^2 / (2 - beta) ||H^-1 T||)^2
//   B = (1 / (delta0^2 (2 - beta))) trace(H^-1 S H^-1),  S = sigma^2/4 I.
struct ABTerms {
  double a_term;
  double b_term;
};
ABTerms ab_terms(const AsymptoticInputs& in);

// Simulation-count ratios versus 2SPSA at equal accuracy: 3/4 times the
// AMSE ratio, since the RDSA variants use three measurements per iteration
// against 2SPSA's four.
double nhat_ratio_unif(const AsymptoticInputs& in);
double nhat_ratio_asymber(const AsymptoticInputs& in);

// Per-accuracy measurement-cost ratios of the first-order gradient
// estimators (RDSA-Unif, RDSA-AsymBer, RDSA-Gauss, SPSA) under optimally
// tuned constants.
std::array<double, 4> measurement_ratio(double eps);

// Limiting covariance of the second-order iterate,
//   Omega = a0^2 sigma^2 / (4 delta0^2 rho^2 (8 a0 - 4 beta+)) (H^-1)^2,
// with rho the user-supplied lower bound from the step-size condition.
Eigen::MatrixXd omega_covariance(const AsymptoticInputs& in, double rho);

// T^l = -(1/6)[ d^3f/dx_l^3 + 3 sum_{i != l} d^3f/dx_i^2 dx_l ] at x*,
// by central finite differences with one step of Richardson extrapolation
// (combining step h and h/2 as (4 D(h/2) - D(h)) / 3, h = 1e-2 (1+||x*||)):
//  - pure term via [f(+2h) - 2f(+h) + 2f(-h) - f(-2h)] / (2h^3),
//  - mixed term as the central difference in x_l of the second difference
//    in x_i.
// Throws ConfigError when the objective has no recorded optimum.
Eigen::VectorXd third_deriv_T(const Objective& obj);

}  // namespace rdsa
