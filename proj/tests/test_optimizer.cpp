#include <cmath>

#include "doctest.h"
#include "rdsa/errors.hpp"
#include "rdsa/estimators.hpp"
#include "rdsa/objectives.hpp"
#include "rdsa/optimizer.hpp"
#include "rdsa/perturbation.hpp"
#include "rdsa/random.hpp"

using namespace rdsa;

namespace {

double nmse_of(const Eigen::VectorXd& x, const Objective& obj) {
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(obj.dim);
  return (x - *obj.xstar).squaredNorm() / (x0 - *obj.xstar).squaredNorm();
}

}  // namespace

TEST_CASE("algorithm names round-trip through the parser") {
  const Algorithm all[] = {
      Algorithm::OneSPSA,        Algorithm::OneRDSAUnif,
      Algorithm::OneRDSAAsymBer, Algorithm::OneRDSAGauss,
      Algorithm::TwoSPSA,        Algorithm::TwoRDSAUnif,
      Algorithm::TwoRDSAAsymBer,
  };
  for (Algorithm a : all) CHECK(parse_algorithm(algorithm_name(a)) == a);
  CHECK(parse_algorithm("2rdsa-UNIF") == Algorithm::TwoRDSAUnif);
  CHECK(parse_algorithm("1Spsa") == Algorithm::OneSPSA);
  CHECK_THROWS_AS(parse_algorithm("3SPSA"), ConfigError);
  CHECK(is_second_order(Algorithm::TwoSPSA));
  CHECK(!is_second_order(Algorithm::OneRDSAGauss));
}

TEST_CASE("benchmark schedules") {
  const Schedule f = first_order_schedule();
  CHECK(f.a(1) == doctest::Approx(1.0 / 51.0).epsilon(1e-15));
  CHECK(f.a(50) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(f.delta(1) == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(f.delta(32) == doctest::Approx(1.9 / std::pow(32.0, 0.101)).epsilon(1e-15));

  const Schedule s = second_order_schedule();
  CHECK(s.a(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.a(4) == doctest::Approx(std::pow(4.0, -0.6)).epsilon(1e-15));
  CHECK(s.delta(1) == doctest::Approx(3.8).epsilon(1e-15));
}

TEST_CASE("plan_budget fixed points") {
  AlgorithmConfig cfg = default_config(Algorithm::TwoRDSAUnif, 10);
  cfg.budget = 2000;
  BudgetPlan p = plan_budget(cfg);
  CHECK(p.warm_iters == 200);
  CHECK(p.main_iters == 533);
  CHECK(p.spent == 1999);

  cfg = default_config(Algorithm::TwoSPSA, 10);
  cfg.budget = 2000;
  p = plan_budget(cfg);
  CHECK(p.warm_iters == 200);
  CHECK(p.main_iters == 400);
  CHECK(p.spent == 2000);

  cfg = default_config(Algorithm::TwoRDSAAsymBer, 10);
  cfg.budget = 10000;
  p = plan_budget(cfg);
  CHECK(p.warm_iters == 1000);
  CHECK(p.main_iters == 2666);
  CHECK(p.spent == 9998);

  cfg = default_config(Algorithm::OneSPSA, 10);
  cfg.budget = 2001;
  p = plan_budget(cfg);
  CHECK(p.warm_iters == 0);
  CHECK(p.main_iters == 1000);
  CHECK(p.spent == 2000);
}

TEST_CASE("default_config picks the benchmark settings") {
  const AlgorithmConfig c1 = default_config(Algorithm::OneRDSAAsymBer, 10);
  CHECK(c1.eps == 1e-4);
  CHECK(c1.schedule.stability == 50.0);
  CHECK(c1.schedule.delta0 == 1.9);
  CHECK(c1.x0.size() == 10);
  CHECK(c1.x0.minCoeff() == 1.0);
  CHECK(c1.x0.maxCoeff() == 1.0);

  const AlgorithmConfig c2 = default_config(Algorithm::TwoRDSAAsymBer, 10);
  CHECK(c2.eps == 1.0);
  CHECK(c2.schedule.alpha == 0.6);
  CHECK(c2.schedule.delta0 == 3.8);
  CHECK(c2.warm_schedule.stability == 50.0);
  CHECK(c2.warm_fraction == 0.2);
}

TEST_CASE("validate rejects bad configs") {
  AlgorithmConfig cfg = default_config(Algorithm::OneSPSA, 10);
  cfg.dim = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = default_config(Algorithm::OneSPSA, 10);
  cfg.budget = 1;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = default_config(Algorithm::OneSPSA, 10);
  cfg.box_lo = 1.0;
  cfg.box_hi = -1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = default_config(Algorithm::TwoRDSAUnif, 10);
  cfg.warm_fraction = 1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = default_config(Algorithm::OneRDSAUnif, 10);
  cfg.eta = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = default_config(Algorithm::OneRDSAAsymBer, 10);
  cfg.eps = -0.5;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = default_config(Algorithm::OneSPSA, 10);
  cfg.x0 = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = default_config(Algorithm::OneSPSA, 10);
  cfg.schedule.delta0 = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  // Second order with the whole budget eaten by the warm start.
  cfg = default_config(Algorithm::TwoRDSAUnif, 10);
  cfg.budget = 2;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("zero gain and zero noise leave the iterate at x0") {
  AlgorithmConfig cfg = default_config(Algorithm::OneSPSA, 5);
  cfg.budget = 100;
  cfg.schedule.a0 = 0.0;
  NoisyOracle oracle(quadratic_objective(5), 0.0, RandomStream(7, 1));
  RandomStream dir(7, 0);
  const RunState s = run(cfg, oracle, dir);
  CHECK((s.x - Eigen::VectorXd::Ones(5)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.measurements == 100);
}

TEST_CASE("runs are deterministic in the seed") {
  for (Algorithm algo : {Algorithm::OneRDSAUnif, Algorithm::TwoRDSAAsymBer}) {
    AlgorithmConfig cfg = default_config(algo, 10);
    cfg.budget = 600;
    Eigen::VectorXd first;
    for (int pass = 0; pass < 2; ++pass) {
      NoisyOracle oracle(quadratic_objective(10), 0.001, RandomStream(42, 1));
      RandomStream dir(42, 0);
      const RunState s = run(cfg, oracle, dir);
      if (pass == 0)
        first = s.x;
      else
        CHECK((s.x - first).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("iterates stay inside the box under a huge gain") {
  AlgorithmConfig cfg = default_config(Algorithm::OneSPSA, 10);
  cfg.budget = 400;
  cfg.schedule.a0 = 1e6;
  NoisyOracle oracle(quadratic_objective(10), 0.1, RandomStream(9, 1));
  RandomStream dir(9, 0);
  const RunState s = run(cfg, oracle, dir);
  CHECK(s.x.minCoeff() >= cfg.box_lo);
  CHECK(s.x.maxCoeff() <= cfg.box_hi);
}

TEST_CASE("run state reports the plan and the measurement ledger") {
  AlgorithmConfig cfg = default_config(Algorithm::TwoSPSA, 10);
  cfg.budget = 2000;
  NoisyOracle oracle(quadratic_objective(10), 0.001, RandomStream(11, 1));
  RandomStream dir(11, 0);
  const RunState s = run(cfg, oracle, dir);
  CHECK(s.warm_iters == 200);
  CHECK(s.iters == 400);
  CHECK(s.measurements == 2000);
  CHECK(oracle.count() == 2000);
  CHECK(s.hbar.rows() == 10);
}

TEST_CASE("iterate averaging reports the mean of the post-update iterates") {
  const int dim = 4;
  const Objective obj = quadratic_objective(dim);
  AlgorithmConfig cfg = default_config(Algorithm::OneSPSA, dim);
  cfg.budget = 200;
  cfg.iterate_averaging = true;

  NoisyOracle oracle(obj, 0.0, RandomStream(21, 1));
  RandomStream dir(21, 0);
  const RunState s = run(cfg, oracle, dir);

  // Mirror the loop with the same direction stream and collect the average
  // by hand.
  NoisyOracle oracle2(obj, 0.0, RandomStream(21, 1));
  RandomStream dir2(21, 0);
  const PerturbationDist dist = PerturbationDist::sym_bernoulli();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(dim);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  const Schedule sched = first_order_schedule();
  for (long n = 1; n <= 100; ++n) {
    const double a_n = sched.a(n);
    const double delta_n = sched.delta(n);
    const Eigen::VectorXd d = sample_direction(dist, dim, dir2);
    const double yp = oracle2.measure(x + delta_n * d);
    const double ym = oracle2.measure(x - delta_n * d);
    const Eigen::VectorXd g = grad_spsa(yp, ym, d, delta_n).g;
    x = project_box(x - a_n * g, cfg.box_lo, cfg.box_hi);
    sum += x;
  }
  CHECK((s.x - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.x_reported - sum / 100.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("first-order error shrinks with budget") {
  const Objective obj = quadratic_objective(10);
  double mean_small = 0.0, mean_large = 0.0;
  const int reps = 30;
  for (int r = 0; r < reps; ++r) {
    for (long long budget : {1000LL, 2000LL}) {
      AlgorithmConfig cfg = default_config(Algorithm::OneSPSA, 10);
      cfg.budget = budget;
      NoisyOracle oracle(obj, 0.001, RandomStream(33, 2 * r + 1));
      RandomStream dir(33, 2 * r);
      const RunState s = run(cfg, oracle, dir);
      (budget == 1000 ? mean_small : mean_large) += nmse_of(s.x, obj) / reps;
    }
  }
  CHECK(mean_large < mean_small);
  CHECK(mean_small < 1.0);
}

TEST_CASE("noise-free second order converges tightly") {
  AlgorithmConfig cfg = default_config(Algorithm::TwoRDSAUnif, 10);
  cfg.budget = 2000;
  const Objective obj = quadratic_objective(10);
  NoisyOracle oracle(obj, 0.0, RandomStream(5, 1));
  RandomStream dir(5, 0);
  const RunState s = run(cfg, oracle, dir);
  CHECK(nmse_of(s.x, obj) < 1e-6);
}

TEST_CASE("FloorDelta conditioning mode runs to completion") {
  AlgorithmConfig cfg = default_config(Algorithm::TwoRDSAAsymBer, 10);
  cfg.budget = 900;
  cfg.conditioning.mode = Conditioning::FloorDelta;
  NoisyOracle oracle(quadratic_objective(10), 0.001, RandomStream(13, 1));
  RandomStream dir(13, 0);
  const RunState s = run(cfg, oracle, dir);
  CHECK(s.measurements == plan_budget(cfg).spent);
  CHECK(s.x.minCoeff() >= cfg.box_lo);
  CHECK(s.x.maxCoeff() <= cfg.box_hi);
}

TEST_CASE("Gaussian directions cannot drive a second-order run") {
  // Config-level guard: the distribution reports it cannot support Hessian
  // estimation, and the run refuses before spending measurements.
  CHECK(!supports_second_order(PerturbationDist::gaussian()));
}

TEST_CASE("run rejects an oracle of the wrong dimension") {
  AlgorithmConfig cfg = default_config(Algorithm::OneSPSA, 10);
  cfg.budget = 100;
  NoisyOracle oracle(quadratic_objective(4), 0.0, RandomStream(3, 1));
  RandomStream dir(3, 0);
  CHECK_THROWS_AS(run(cfg, oracle, dir), ConfigError);
}
