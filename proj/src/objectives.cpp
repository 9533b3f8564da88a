#include "rdsa/objectives.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "rdsa/errors.hpp"

namespace rdsa {

Eigen::MatrixXd upper_ones_over_n(int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) a(i, j) = 1.0 / dim;
  return a;
}

Objective quadratic_objective(int dim) {
  if (dim < 1) throw ConfigError("objective dimension must be >= 1");
  const Eigen::MatrixXd a = upper_ones_over_n(dim);
  const Eigen::MatrixXd h = a + a.transpose();
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(dim);

  Objective obj;
  obj.name = "quadratic";
  obj.dim = dim;
  obj.eval = [a, b](const Eigen::VectorXd& x) {
    return x.dot(a * x) + b.dot(x);
  };
  obj.grad = [h, b](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return h * x + b;
  };
  obj.hess = [h](const Eigen::VectorXd&) { return h; };
  Eigen::VectorXd xs = h.ldlt().solve(-b);
  obj.xstar = xs;
  obj.fstar = obj.eval(xs);
  return obj;
}

Objective fourth_order_objective(int dim) {
  if (dim < 1) throw ConfigError("objective dimension must be >= 1");
  const Eigen::MatrixXd a = upper_ones_over_n(dim);

  Objective obj;
  obj.name = "fourth-order";
  obj.dim = dim;
  obj.eval = [a](const Eigen::VectorXd& x) {
    const Eigen::VectorXd v = a * x;
    return v.squaredNorm() + 0.1 * v.array().cube().sum() +
           0.01 * v.array().pow(4).sum();
  };
  obj.grad = [a](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::ArrayXd v = (a * x).array();
    return a.transpose() * (2.0 * v + 0.3 * v.square() + 0.04 * v.cube()).matrix();
  };
  obj.hess = [a](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const Eigen::ArrayXd v = (a * x).array();
    const Eigen::VectorXd w = (2.0 + 0.6 * v + 0.12 * v.square()).matrix();
    return a.transpose() * w.asDiagonal() * a;
  };
  obj.xstar = Eigen::VectorXd::Zero(dim);
  obj.fstar = 0.0;
  return obj;
}

Objective make_objective(const std::string& name, int dim) {
  if (name == "quadratic") return quadratic_objective(dim);
  if (name == "fourth-order" || name == "fourth_order")
    return fourth_order_objective(dim);
  throw ConfigError("unknown objective: " + name);
}

NoisyOracle::NoisyOracle(Objective obj, double sigma, RandomStream rng)
    : obj_(std::move(obj)), sigma_(sigma), rng_(rng) {
  if (sigma < 0.0 || !std::isfinite(sigma))
    throw ConfigError("noise sigma must be finite and >= 0");
  if (!obj_.eval) throw ConfigError("objective has no eval function");
}

double NoisyOracle::measure(const Eigen::VectorXd& x) {
  ++count_;
  double y = obj_.eval(x);
  if (sigma_ > 0.0) {
    double noise = 0.0;
    for (int i = 0; i < x.size(); ++i) noise += x[i] * rng_.gaussian();
    noise += rng_.gaussian();
    y += sigma_ * noise;
  }
  if (!std::isfinite(y))
    throw NumericalError("objective measurement is not finite");
  return y;
}

}  // namespace rdsa
