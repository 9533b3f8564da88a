#include <cmath>

#include "doctest.h"
#include "rdsa/errors.hpp"
#include "rdsa/objectives.hpp"
#include "rdsa/perturbation.hpp"
#include "rdsa/random.hpp"
#include "rdsa/theory.hpp"

using namespace rdsa;

namespace {

// Scalar-problem inputs: H = [h], T = [t], critical gamma.
AsymptoticInputs scalar_inputs(double h, double t) {
  AsymptoticInputs in;
  in.hessian_at_opt = Eigen::MatrixXd::Constant(1, 1, h);
  in.third_deriv_contraction = Eigen::VectorXd::Constant(1, t);
  in.noise_variance = 1.0;
  in.a0 = 1.0;
  in.delta0 = 1.0;
  in.alpha = 1.0;
  in.gamma = 1.0 / 6.0;
  return in;
}

AsymptoticInputs random_inputs(int n, RandomStream& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = 2.0 * rng.uniform01() - 1.0;
  AsymptoticInputs in;
  in.hessian_at_opt =
      g * g.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  in.third_deriv_contraction = Eigen::VectorXd(n);
  for (int i = 0; i < n; ++i)
    in.third_deriv_contraction[i] = 2.0 * rng.uniform01() - 1.0;
  in.noise_variance = 0.001 + rng.uniform01();
  in.delta0 = 0.5 + 1.5 * rng.uniform01();
  in.a0 = 1.0;
  in.alpha = 1.0;
  in.gamma = 1.0 / 6.0;
  return in;
}

}  // namespace

TEST_CASE("bias constants") {
  CHECK(k_mu_unif() == 3.6);
  CHECK(k_mu_asymber(1.0) == 3.0);
  // 2 (1+eps) (1 + (1+eps)^3) / ((2+eps) (1+eps)^2) at eps = 0.01.
  const double expected = 2.0 * 1.01 * (1.0 + 1.01 * 1.01 * 1.01) /
                          (2.01 * 1.01 * 1.01);
  CHECK(k_mu_asymber(0.01) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(std::abs(k_mu_asymber(0.01) - 2.000198) < 1e-6);
  CHECK_THROWS_AS(k_mu_asymber(0.0), ConfigError);
}

TEST_CASE("k_mu_asymber is twice the fourth moment ratio") {
  for (double eps : {0.01, 0.1, 0.5, 1.0, 2.0}) {
    const double lhs = k_mu_asymber(eps);
    const double rhs =
        2.0 * fourth_moment_ratio(PerturbationDist::asym_bernoulli(eps));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("fourth moment ratio at small eps") {
  const double r = fourth_moment_ratio(PerturbationDist::asym_bernoulli(0.01));
  CHECK(std::abs(r - 1.000099) < 5e-7);
  CHECK(fourth_moment_ratio(PerturbationDist::sym_bernoulli()) == 1.0);
  CHECK(fourth_moment_ratio(PerturbationDist::gaussian()) == 3.0);
  // Uniform: (eta^4/5) / (eta^2/3)^2 = 9/5 for any eta.
  CHECK(fourth_moment_ratio(PerturbationDist::uniform_sym(0.7)) ==
        doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("first-order AMSE on a scalar problem") {
  // H = 2, T = 1, sigma^2 = 1, a0 = delta0 = 1, beta = beta+ = 2/3.
  // Bias: k/(2*2 - 2/3) = 0.3 k; variance: (1/4)/(10/3) = 0.075.
  const AsymptoticInputs in = scalar_inputs(2.0, 1.0);
  CHECK(amse(AmseVariant::OneRDSAUnif, in) ==
        doctest::Approx(1.08 * 1.08 + 0.075).epsilon(1e-12));
  AsymptoticInputs ab = in;
  ab.eps = 1.0;  // k = 3
  CHECK(amse(AmseVariant::OneRDSAAsymBer, ab) ==
        doctest::Approx(0.81 + 0.075).epsilon(1e-12));
}

TEST_CASE("away from the critical gamma the bias term vanishes") {
  AsymptoticInputs in = scalar_inputs(2.0, 5.0);
  in.gamma = 0.25;  // beta = 0.5, not the critical value
  const double with_t = amse(AmseVariant::OneRDSAUnif, in);
  in.third_deriv_contraction[0] = 0.0;
  const double without_t = amse(AmseVariant::OneRDSAUnif, in);
  CHECK(with_t == doctest::Approx(without_t).epsilon(1e-14));
  CHECK(with_t == doctest::Approx(0.25 / 3.5).epsilon(1e-12));
}

TEST_CASE("averaged and second-order AMSE on a scalar problem") {
  const AsymptoticInputs in = scalar_inputs(2.0, 1.0);
  // ||H^-1 T|| = 0.5, 2 - beta = 4/3, trace(H^-1 S H^-1) = 1/16.
  CHECK(amse(AmseVariant::OneRDSAUnifAvg, in) ==
        doctest::Approx(1.35 * 1.35 + 0.046875).epsilon(1e-12));
  CHECK(amse(AmseVariant::TwoRDSAUnif, in) ==
        doctest::Approx(1.869375).epsilon(1e-12));
  CHECK(amse(AmseVariant::TwoSPSA, in) ==
        doctest::Approx(0.609375).epsilon(1e-12));
  AsymptoticInputs ab = in;
  ab.eps = 1.0;
  CHECK(amse(AmseVariant::TwoRDSAAsymBer, ab) ==
        doctest::Approx(1.3125).epsilon(1e-12));
}

TEST_CASE("with T = 0 all second-order variants share the variance term") {
  AsymptoticInputs in;
  in.hessian_at_opt = Eigen::MatrixXd::Identity(2, 2);
  in.third_deriv_contraction = Eigen::VectorXd::Zero(2);
  in.noise_variance = 4.0;
  in.a0 = 1.0;
  in.delta0 = 1.0;
  in.alpha = 1.0;
  in.gamma = 1.0 / 6.0;
  for (AmseVariant v : {AmseVariant::TwoRDSAUnif, AmseVariant::TwoRDSAAsymBer,
                        AmseVariant::TwoSPSA}) {
    CHECK(amse(v, in) == doctest::Approx(1.5).epsilon(1e-12));
  }
}

TEST_CASE("ab_terms on a scalar problem") {
  const ABTerms ab = ab_terms(scalar_inputs(2.0, 1.0));
  CHECK(ab.a_term == doctest::Approx(0.5625).epsilon(1e-12));
  CHECK(ab.b_term == doctest::Approx(0.046875).epsilon(1e-12));
}

TEST_CASE("nhat ratios equal 3/4 of the AMSE ratio at a0 = 1") {
  RandomStream rng(201, 0);
  for (int trial = 0; trial < 50; ++trial) {
    AsymptoticInputs in = random_inputs(5, rng);
    const double direct =
        0.75 * amse(AmseVariant::TwoRDSAUnif, in) /
        amse(AmseVariant::TwoSPSA, in);
    CHECK(nhat_ratio_unif(in) == doctest::Approx(direct).epsilon(1e-12));

    in.eps = 0.01;
    const double direct_ab =
        0.75 * amse(AmseVariant::TwoRDSAAsymBer, in) /
        amse(AmseVariant::TwoSPSA, in);
    CHECK(nhat_ratio_asymber(in) == doctest::Approx(direct_ab).epsilon(1e-12));
  }
}

TEST_CASE("asymmetric Bernoulli beats 2SPSA on simulation count") {
  RandomStream rng(202, 0);
  for (int trial = 0; trial < 200; ++trial) {
    AsymptoticInputs in = random_inputs(5, rng);
    in.eps = 0.01;
    CHECK(nhat_ratio_asymber(in) < 1.0);
  }
}

TEST_CASE("measurement cost ratios") {
  const auto r = measurement_ratio(0.35);
  CHECK(r[0] == 1.8);
  CHECK(r[1] == doctest::Approx(1.35).epsilon(1e-15));
  CHECK(r[2] == 3.0);
  CHECK(r[3] == 1.0);
  CHECK_THROWS_AS(measurement_ratio(0.0), ConfigError);
}

TEST_CASE("omega covariance on a scalar problem") {
  // H = 1: denom = 8 - 4 * 2/3 = 16/3, scale = 3/64, (H^-1)^2 = 1.
  const AsymptoticInputs in = scalar_inputs(1.0, 0.0);
  const Eigen::MatrixXd om = omega_covariance(in, 1.0);
  CHECK(om(0, 0) == doctest::Approx(3.0 / 64.0).epsilon(1e-12));
  CHECK_THROWS_AS(omega_covariance(in, 0.0), ConfigError);
}

TEST_CASE("amse input validation") {
  AsymptoticInputs in = scalar_inputs(2.0, 1.0);
  in.gamma = 0.5;  // beta = 0
  CHECK_THROWS_AS(amse(AmseVariant::TwoSPSA, in), ConfigError);
  in.gamma = 0.05;  // beta = 0.9 > 2/3
  CHECK_THROWS_AS(amse(AmseVariant::TwoSPSA, in), ConfigError);

  in = scalar_inputs(-1.0, 1.0);  // not PD
  CHECK_THROWS_AS(amse(AmseVariant::TwoRDSAUnif, in), ConfigError);

  in = scalar_inputs(0.1, 1.0);  // 2 a0 lambda < beta+
  CHECK_THROWS_AS(amse(AmseVariant::OneRDSAUnif, in), ConfigError);

  in = scalar_inputs(2.0, 1.0);
  in.third_deriv_contraction = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(amse(AmseVariant::TwoSPSA, in), ConfigError);
}

TEST_CASE("third derivative contraction of the quadratic is zero") {
  const Eigen::VectorXd t = third_deriv_T(quadratic_objective(10));
  CHECK(t.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("third derivative contraction of a scalar cubic") {
  Objective obj;
  obj.name = "cubic";
  obj.dim = 1;
  obj.eval = [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[0]; };
  obj.xstar = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd t = third_deriv_T(obj);
  // T = -(1/6) f''' = -1.
  CHECK(t[0] == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("third derivative contraction of the fourth-order objective") {
  const int n = 6;
  const Objective obj = fourth_order_objective(n);
  const Eigen::VectorXd t = third_deriv_T(obj);

  // At the origin only the cubic term contributes:
  // d^3 f / dx_i dx_j dx_k = 0.6 sum_m A_mi A_mj A_mk.
  const Eigen::MatrixXd a = upper_ones_over_n(n);
  auto d3 = [&](int i, int j, int k) {
    double s = 0.0;
    for (int m = 0; m < n; ++m) s += a(m, i) * a(m, j) * a(m, k);
    return 0.6 * s;
  };
  for (int l = 0; l < n; ++l) {
    double expected = d3(l, l, l);
    for (int i = 0; i < n; ++i)
      if (i != l) expected += 3.0 * d3(i, i, l);
    expected /= -6.0;
    CHECK(t[l] == doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("third_deriv_T requires a recorded optimum") {
  Objective obj;
  obj.name = "anon";
  obj.dim = 2;
  obj.eval = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  CHECK_THROWS_AS(third_deriv_T(obj), ConfigError);
}
