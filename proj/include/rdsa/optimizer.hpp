#pragma once

#include <Eigen/Core>
#include <string>

#include "rdsa/objectives.hpp"
#include "rdsa/perturbation.hpp"
#include "rdsa/random.hpp"

namespace rdsa {

enum class Algorithm {
  OneSPSA,
  OneRDSAUnif,
  OneRDSAAsymBer,
  OneRDSAGauss,
  TwoSPSA,
  TwoRDSAUnif,
  TwoRDSAAsymBer,
};

bool is_second_order(Algorithm a);
std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& s);  // ConfigError on unknown

// Gain sequences a_n = a0 / (n + stability)^alpha and
// delta_n = delta0 / n^gamma, n >= 1.
struct Schedule {
  double a0 = 1.0;
  double stability = 0.0;
  double alpha = 1.0;
  double delta0 = 1.9;
  double gamma = 0.101;

  double a(long n) const;
  double delta(long n) const;
};

// The benchmark settings: 1/(n+50) and 1.9/n^0.101 for first order,
// 1/n^0.6 and 3.8/n^0.101 for second order.
Schedule first_order_schedule();
Schedule second_order_schedule();

// How the Newton step tames the noisy smoothed Hessian estimate.
//
// FloorDelta maps eigenvalues through max(lambda, 0) + delta_n and solves
// the projected system. With the benchmark delta-schedule the floor is
// around 2 for thousands of iterations, which overdamps the step so badly
// that the iterate barely moves; the mode is kept for reference and
// experiments with other schedules.
//
// EigShrink (default) shrinks eigenvalues toward their median before
// inverting. The smoothed estimate's small eigenvalues carry noise that is
// comparable to the true small curvatures for any realistic iteration
// count, so raw inversion amplifies noise while hard floors kill progress.
// Median-anchored shrinkage with weight n/(n + n0) trusts the estimate
// gradually; the median is robust against the heavy-tailed trace errors the
// asymmetric Bernoulli estimator produces early on. A decaying ridge
// max(ridge_min, ridge0/n) inside lambda' = sqrt(lambda~^2 + ridge) bounds
// the inverse gain, and a per-coordinate step clamp suppresses the rare
// spike that slips through.
enum class Conditioning { EigShrink, FloorDelta };

struct ConditioningParams {
  Conditioning mode = Conditioning::EigShrink;
  double shrink_n0 = 400.0;
  double ridge0 = 0.5;
  double ridge_min = 1e-4;
  double step_clamp = 0.5;
};

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::OneSPSA;
  int dim = 10;
  double eta = 1.0;   // uniform perturbation half-width
  double eps = 1.0;   // asymmetric Bernoulli parameter
  long long budget = 2000;
  Schedule schedule;       // main loop
  Schedule warm_schedule;  // first-order warm start (second order only)
  double warm_fraction = 0.2;
  double box_lo = -2.048;
  double box_hi = 2.047;
  bool iterate_averaging = false;
  ConditioningParams conditioning;
  Eigen::VectorXd x0;  // empty means ones(dim)
};

// Canonical config for one benchmark cell: schedules above, x0 = ones,
// eps = 1e-4 for 1RDSA-AsymBer and 1.0 for 2RDSA-AsymBer.
AlgorithmConfig default_config(Algorithm algo, int dim);

void validate(const AlgorithmConfig& cfg);

struct RunState {
  Eigen::VectorXd x;           // last raw iterate
  Eigen::VectorXd x_reported;  // averaged iterate when averaging is on
  Eigen::MatrixXd hbar;        // smoothed Hessian estimate (second order)
  long iters = 0;              // main-loop iterations completed
  long warm_iters = 0;
  long long measurements = 0;  // total measurements spent, warm start included
  long solve_fallbacks = 0;    // FloorDelta solves that fell back to a gradient step
};

Eigen::VectorXd project_box(Eigen::VectorXd x, double lo, double hi);

// Iteration counts implied by the measurement budget: first order runs
// budget/2 iterations; second order spends floor(warm_fraction * budget)
// rounded down to an even number on the warm start, then 3 (RDSA) or
// 4 (SPSA) measurements per main iteration, discarding the remainder.
struct BudgetPlan {
  long warm_iters;
  long main_iters;
  long long spent;
};
BudgetPlan plan_budget(const AlgorithmConfig& cfg);

RunState run(const AlgorithmConfig& cfg, NoisyOracle& oracle,
             RandomStream& dir_rng);

}  // namespace rdsa
