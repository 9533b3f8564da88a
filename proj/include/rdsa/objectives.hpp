#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "rdsa/random.hpp"

namespace rdsa {

struct Objective {
  std::string name;
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> eval;
  // Analytic derivatives where available (used by estimator bias checks and
  // the asymptotic-constant calculations); may be empty for user objectives.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;
  std::optional<Eigen::VectorXd> xstar;
  std::optional<double> fstar;
};

// A = upper-triangular ones / N, shared by both benchmark objectives.
Eigen::MatrixXd upper_ones_over_n(int dim);

// f(x) = x'Ax + b'x with b = ones. Minimizer solves (A + A')x = -b.
Objective quadratic_objective(int dim);

// f(x) = x'A'Ax + 0.1 sum_j (Ax)_j^3 + 0.01 sum_j (Ax)_j^4, minimizer 0.
Objective fourth_order_objective(int dim);

// Lookup by CLI name ("quadratic", "fourth-order"). Throws ConfigError on
// unknown names or dim < 1.
Objective make_objective(const std::string& name, int dim);

// Measurement channel y = f(x) + noise, where the noise is [x', 1] z with
// z ~ N(0, sigma^2 I_{dim+1}) drawn fresh per call. Variance grows with
// ||x||^2 so early iterates see more noise than near-converged ones.
class NoisyOracle {
 public:
  NoisyOracle(Objective obj, double sigma, RandomStream rng);

  double measure(const Eigen::VectorXd& x);

  long long count() const { return count_; }
  void reset_count() { count_ = 0; }
  double sigma() const { return sigma_; }
  const Objective& objective() const { return obj_; }

 private:
  Objective obj_;
  double sigma_;
  RandomStream rng_;
  long long count_ = 0;
};

}  // namespace rdsa
