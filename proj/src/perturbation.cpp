#include "rdsa/perturbation.hpp"

#include <cmath>

#include "rdsa/errors.hpp"

namespace rdsa {

PerturbationDist PerturbationDist::uniform_sym(double eta) {
  PerturbationDist d;
  d.kind = PerturbKind::UniformSym;
  d.eta = eta;
  return d;
}

PerturbationDist PerturbationDist::asym_bernoulli(double eps) {
  PerturbationDist d;
  d.kind = PerturbKind::AsymBernoulli;
  d.eps = eps;
  return d;
}

PerturbationDist PerturbationDist::sym_bernoulli() {
  PerturbationDist d;
  d.kind = PerturbKind::SymBernoulli;
  return d;
}

PerturbationDist PerturbationDist::gaussian() {
  PerturbationDist d;
  d.kind = PerturbKind::Gaussian;
  return d;
}

void validate(const PerturbationDist& dist) {
  switch (dist.kind) {
    case PerturbKind::UniformSym:
      if (!(dist.eta > 0.0) || !std::isfinite(dist.eta))
        throw ConfigError("uniform perturbation requires eta > 0");
      break;
    case PerturbKind::AsymBernoulli:
      if (!(dist.eps > 0.0) || !std::isfinite(dist.eps))
        throw ConfigError("asymmetric Bernoulli perturbation requires eps > 0");
      break;
    case PerturbKind::SymBernoulli:
    case PerturbKind::Gaussian:
      break;
  }
}

PerturbMoments moments(const PerturbationDist& dist) {
  validate(dist);
  switch (dist.kind) {
    case PerturbKind::UniformSym: {
      const double e2 = dist.eta * dist.eta;
      return {e2 / 3.0, e2 * e2 / 5.0};
    }
    case PerturbKind::AsymBernoulli: {
      // P(d = -1) = (1+eps)/(2+eps), P(d = 1+eps) = 1/(2+eps).
      const double q = 1.0 + dist.eps;
      const double m2 = q;
      const double m4 = q * (1.0 + q * q * q) / (2.0 + dist.eps);
      return {m2, m4};
    }
    case PerturbKind::SymBernoulli:
      return {1.0, 1.0};
    case PerturbKind::Gaussian:
      return {1.0, 3.0};
  }
  throw ConfigError("unknown perturbation kind");
}

bool supports_second_order(const PerturbationDist& dist) {
  return dist.kind != PerturbKind::Gaussian;
}

std::string name(const PerturbationDist& dist) {
  switch (dist.kind) {
    case PerturbKind::UniformSym:
      return "uniform";
    case PerturbKind::AsymBernoulli:
      return "asym-bernoulli";
    case PerturbKind::SymBernoulli:
      return "sym-bernoulli";
    case PerturbKind::Gaussian:
      return "gaussian";
  }
  return "unknown";
}

Eigen::VectorXd sample_direction(const PerturbationDist& dist, int dim,
                                 RandomStream& rng) {
  if (dim <= 0) throw ConfigError("direction dimension must be positive");
  validate(dist);
  Eigen::VectorXd d(dim);
  switch (dist.kind) {
    case PerturbKind::UniformSym:
      for (int i = 0; i < dim; ++i)
        d[i] = dist.eta * (2.0 * rng.uniform01() - 1.0);
      break;
    case PerturbKind::AsymBernoulli: {
      const double p_minus = (1.0 + dist.eps) / (2.0 + dist.eps);
      for (int i = 0; i < dim; ++i)
        d[i] = rng.uniform01() < p_minus ? -1.0 : 1.0 + dist.eps;
      break;
    }
    case PerturbKind::SymBernoulli:
      for (int i = 0; i < dim; ++i) d[i] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      break;
    case PerturbKind::Gaussian:
      for (int i = 0; i < dim; ++i) d[i] = rng.gaussian();
      break;
  }
  return d;
}

}  // namespace rdsa
