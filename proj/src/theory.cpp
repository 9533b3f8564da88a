#include "rdsa/theory.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "rdsa/errors.hpp"
#include "rdsa/linalg.hpp"

namespace rdsa {

double k_mu_unif() { return 18.0 / 5.0; }

double k_mu_asymber(double eps) {
  if (!(eps > 0.0)) throw ConfigError("k_mu_asymber requires eps > 0");
  const double q = 1.0 + eps;
  return 2.0 * q * (1.0 + q * q * q) / ((2.0 + eps) * q * q);
}

double fourth_moment_ratio(const PerturbationDist& dist) {
  const PerturbMoments m = moments(dist);
  return m.m4 / (m.m2 * m.m2);
}

namespace {

// Eigenvalues of the Hessian input, validated PD.
Eigen::VectorXd pd_eigenvalues(const AsymptoticInputs& in) {
  if (in.hessian_at_opt.rows() != in.hessian_at_opt.cols())
    throw ConfigError("hessian_at_opt must be square");
  if (in.third_deriv_contraction.size() != in.hessian_at_opt.rows())
    throw ConfigError("T dimension does not match Hessian");
  const EigenSym e = eigen_sym(in.hessian_at_opt);
  if (!(e.values.minCoeff() > 0.0))
    throw ConfigError("hessian_at_opt must be positive definite");
  return e.values;
}

void check_common(const AsymptoticInputs& in) {
  const double beta = in.beta();
  if (!(beta > 0.0) || beta > 2.0 / 3.0 + 1e-12)
    throw ConfigError("beta = alpha - 2 gamma must lie in (0, 2/3]");
  if (!(in.a0 > 0.0) || !(in.delta0 > 0.0))
    throw ConfigError("a0 and delta0 must be > 0");
  if (in.noise_variance < 0.0)
    throw ConfigError("noise variance must be >= 0");
}

// Whether the critical-gamma bias term of the plain first-order limit is
// active.
bool bias_active(const AsymptoticInputs& in) {
  return std::abs(in.gamma - in.alpha / 6.0) <= 1e-12;
}

// 2 c_dist: the multiplier in front of the squared-bias term. Setting the
// distribution factor to 1 (SPSA) recovers the 2SPSA expression.
double bias_multiplier(AmseVariant v, double eps) {
  switch (v) {
    case AmseVariant::OneRDSAUnif:
    case AmseVariant::OneRDSAUnifAvg:
    case AmseVariant::TwoRDSAUnif:
      return k_mu_unif();
    case AmseVariant::OneRDSAAsymBer:
    case AmseVariant::TwoRDSAAsymBer:
      return k_mu_asymber(eps);
    case AmseVariant::TwoSPSA:
      return 2.0;
  }
  throw ConfigError("unknown AMSE variant");
}

}  // namespace

double amse(AmseVariant variant, const AsymptoticInputs& in) {
  check_common(in);
  const Eigen::VectorXd lam = pd_eigenvalues(in);
  const double beta = in.beta();
  const double beta_p = in.beta_plus();
  const double s = in.noise_variance / 4.0;  // S = s I
  const double d2 = in.delta0 * in.delta0;
  const double k = bias_multiplier(variant, in.eps);

  switch (variant) {
    case AmseVariant::OneRDSAUnif:
    case AmseVariant::OneRDSAAsymBer: {
      // mu' mu + trace(P M P'), with M the diagonal limiting covariance.
      for (int i = 0; i < lam.size(); ++i)
        if (!(2.0 * in.a0 * lam[i] - beta_p > 0.0))
          throw ConfigError("a0 too small: 2 a0 lambda_min must exceed beta+");
      double variance = 0.0;
      for (int i = 0; i < lam.size(); ++i)
        variance += 1.0 / (2.0 * in.a0 * lam[i] - beta_p);
      variance *= in.a0 * in.a0 * s / d2;
      double bias2 = 0.0;
      if (bias_active(in)) {
        Eigen::MatrixXd shifted = 2.0 * in.a0 * in.hessian_at_opt;
        shifted.diagonal().array() -= beta_p;
        const Eigen::VectorXd mu =
            k * in.a0 * d2 *
            shifted.ldlt().solve(in.third_deriv_contraction);
        bias2 = mu.squaredNorm();
      }
      return bias2 + variance;
    }
    case AmseVariant::OneRDSAUnifAvg: {
      const Eigen::VectorXd hinv_t =
          in.hessian_at_opt.ldlt().solve(in.third_deriv_contraction);
      const double bias = k * d2 / (2.0 - beta) * hinv_t.norm();
      double tr = 0.0;  // trace(H^-1 S H^-1)
      for (int i = 0; i < lam.size(); ++i) tr += s / (lam[i] * lam[i]);
      return bias * bias + tr / (d2 * (2.0 - beta));
    }
    case AmseVariant::TwoRDSAUnif:
    case AmseVariant::TwoRDSAAsymBer:
    case AmseVariant::TwoSPSA: {
      const double denom = 2.0 * in.a0 - beta;
      if (!(denom > 0.0))
        throw ConfigError("a0 too small: 2 a0 must exceed beta");
      const Eigen::VectorXd hinv_t =
          in.hessian_at_opt.ldlt().solve(in.third_deriv_contraction);
      const double bias = k * d2 * in.a0 / denom * hinv_t.norm();
      double tr = 0.0;
      for (int i = 0; i < lam.size(); ++i) tr += s / (lam[i] * lam[i]);
      return bias * bias + in.a0 * in.a0 * tr / (d2 * denom);
    }
  }
  throw ConfigError("unknown AMSE variant");
}

ABTerms ab_terms(const AsymptoticInputs& in) {
  check_common(in);
  const Eigen::VectorXd lam = pd_eigenvalues(in);
  const double beta = in.beta();
  const double d2 = in.delta0 * in.delta0;
  const Eigen::VectorXd hinv_t =
      in.hessian_at_opt.ldlt().solve(in.third_deriv_contraction);
  const double a_root = 2.0 * d2 / (2.0 - beta) * hinv_t.norm();
  double tr = 0.0;
  for (int i = 0; i < lam.size(); ++i)
    tr += in.noise_variance / 4.0 / (lam[i] * lam[i]);
  return {a_root * a_root, tr / (d2 * (2.0 - beta))};
}

double nhat_ratio_unif(const AsymptoticInputs& in) {
  const ABTerms ab = ab_terms(in);
  return 0.75 * (3.24 * ab.a_term + ab.b_term) / (ab.a_term + ab.b_term);
}

double nhat_ratio_asymber(const AsymptoticInputs& in) {
  const ABTerms ab = ab_terms(in);
  const double c = k_mu_asymber(in.eps) / 2.0;  // m4/m2^2
  return 0.75 * (c * c * ab.a_term + ab.b_term) / (ab.a_term + ab.b_term);
}

std::array<double, 4> measurement_ratio(double eps) {
  if (!(eps > 0.0)) throw ConfigError("measurement_ratio requires eps > 0");
  return {1.8, 1.0 + eps, 3.0, 1.0};
}

Eigen::MatrixXd omega_covariance(const AsymptoticInputs& in, double rho) {
  check_common(in);
  pd_eigenvalues(in);
  if (!(rho > 0.0)) throw ConfigError("rho must be > 0");
  const double denom = 8.0 * in.a0 - 4.0 * in.beta_plus();
  if (!(denom > 0.0))
    throw ConfigError("a0 too small: 8 a0 must exceed 4 beta+");
  const Eigen::MatrixXd hinv =
      in.hessian_at_opt.ldlt().solve(
          Eigen::MatrixXd::Identity(in.hessian_at_opt.rows(),
                                    in.hessian_at_opt.cols()));
  const double scale = in.a0 * in.a0 * in.noise_variance /
                       (4.0 * in.delta0 * in.delta0 * rho * rho * denom);
  return scale * hinv * hinv;
}

namespace {

// d^3 f / dx_i^2 dx_l at x, central differences with step h.
double third_iil(const std::function<double(const Eigen::VectorXd&)>& f,
                 const Eigen::VectorXd& x, int i, int l, double h) {
  Eigen::VectorXd ei = Eigen::VectorXd::Zero(x.size());
  ei[i] = h;
  if (i == l) {
    return (f(x + 2.0 * ei) - 2.0 * f(x + ei) + 2.0 * f(x - ei) -
            f(x - 2.0 * ei)) /
           (2.0 * h * h * h);
  }
  Eigen::VectorXd el = Eigen::VectorXd::Zero(x.size());
  el[l] = h;
  auto second_ii = [&](const Eigen::VectorXd& z) {
    return (f(z + ei) - 2.0 * f(z) + f(z - ei)) / (h * h);
  };
  return (second_ii(x + el) - second_ii(x - el)) / (2.0 * h);
}

}  // namespace

Eigen::VectorXd third_deriv_T(const Objective& obj) {
  if (!obj.xstar.has_value())
    throw ConfigError("third_deriv_T requires an objective with a recorded "
                      "optimum");
  if (!obj.eval) throw ConfigError("objective has no eval function");
  const Eigen::VectorXd& x = *obj.xstar;
  const int n = obj.dim;
  const double h = 1e-2 * (1.0 + x.norm());

  Eigen::VectorXd t(n);
  for (int l = 0; l < n; ++l) {
    auto contracted = [&](double step) {
      double v = third_iil(obj.eval, x, l, l, step);
      for (int i = 0; i < n; ++i)
        if (i != l) v += 3.0 * third_iil(obj.eval, x, i, l, step);
      return v;
    };
    // Richardson: cancel the O(h^2) error of the central stencils.
    const double r = (4.0 * contracted(h / 2.0) - contracted(h)) / 3.0;
    t[l] = -r / 6.0;
  }
  return t;
}

}  // namespace rdsa
