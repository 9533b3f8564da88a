#pragma once

#include <Eigen/Core>
#include <string>

#include "rdsa/random.hpp"

namespace rdsa {

// Candidate distributions for the random perturbation direction d_n. All are
// zero-mean with i.i.d. coordinates; the estimator scalings depend only on
// the second and fourth moments below.
enum class PerturbKind { UniformSym, AsymBernoulli, SymBernoulli, Gaussian };

struct PerturbationDist {
  PerturbKind kind = PerturbKind::UniformSym;
  double eta = 1.0;  // UniformSym half-width, support [-eta, eta]
  double eps = 1.0;  // AsymBernoulli asymmetry, support {-1, 1+eps}

  static PerturbationDist uniform_sym(double eta);
  static PerturbationDist asym_bernoulli(double eps);
  static PerturbationDist sym_bernoulli();
  static PerturbationDist gaussian();
};

struct PerturbMoments {
  double m2;  // E[d^2]
  double m4;  // E[d^4]
};

// Throws ConfigError on non-positive eta/eps or non-finite parameters.
void validate(const PerturbationDist& dist);

PerturbMoments moments(const PerturbationDist& dist);

// True for the distributions with the bounded-inverse-moment property needed
// by the Hessian estimators (Gaussian lacks it).
bool supports_second_order(const PerturbationDist& dist);

std::string name(const PerturbationDist& dist);

// One i.i.d. direction vector.
Eigen::VectorXd sample_direction(const PerturbationDist& dist, int dim,
                                 RandomStream& rng);

}  // namespace rdsa
