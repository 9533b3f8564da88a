#include "rdsa/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "rdsa/errors.hpp"
#include "rdsa/estimators.hpp"
#include "rdsa/linalg.hpp"

namespace rdsa {

bool is_second_order(Algorithm a) {
  return a == Algorithm::TwoSPSA || a == Algorithm::TwoRDSAUnif ||
         a == Algorithm::TwoRDSAAsymBer;
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::OneSPSA:
      return "1SPSA";
    case Algorithm::OneRDSAUnif:
      return "1RDSA-Unif";
    case Algorithm::OneRDSAAsymBer:
      return "1RDSA-AsymBer";
    case Algorithm::OneRDSAGauss:
      return "1RDSA-Gauss";
    case Algorithm::TwoSPSA:
      return "2SPSA";
    case Algorithm::TwoRDSAUnif:
      return "2RDSA-Unif";
    case Algorithm::TwoRDSAAsymBer:
      return "2RDSA-AsymBer";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& s) {
  std::string t;
  t.reserve(s.size());
  for (char c : s) t.push_back(static_cast<char>(std::tolower(c)));
  if (t == "1spsa") return Algorithm::OneSPSA;
  if (t == "1rdsa-unif") return Algorithm::OneRDSAUnif;
  if (t == "1rdsa-asymber") return Algorithm::OneRDSAAsymBer;
  if (t == "1rdsa-gauss") return Algorithm::OneRDSAGauss;
  if (t == "2spsa") return Algorithm::TwoSPSA;
  if (t == "2rdsa-unif") return Algorithm::TwoRDSAUnif;
  if (t == "2rdsa-asymber") return Algorithm::TwoRDSAAsymBer;
  throw ConfigError("unknown algorithm: " + s);
}

double Schedule::a(long n) const {
  return a0 / std::pow(static_cast<double>(n) + stability, alpha);
}

double Schedule::delta(long n) const {
  return delta0 / std::pow(static_cast<double>(n), gamma);
}

Schedule first_order_schedule() { return Schedule{1.0, 50.0, 1.0, 1.9, 0.101}; }

Schedule second_order_schedule() { return Schedule{1.0, 0.0, 0.6, 3.8, 0.101}; }

Eigen::VectorXd project_box(Eigen::VectorXd x, double lo, double hi) {
  for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo, hi);
  return x;
}

namespace {

Algorithm first_order_counterpart(Algorithm a) {
  switch (a) {
    case Algorithm::TwoSPSA:
      return Algorithm::OneSPSA;
    case Algorithm::TwoRDSAUnif:
      return Algorithm::OneRDSAUnif;
    case Algorithm::TwoRDSAAsymBer:
      return Algorithm::OneRDSAAsymBer;
    default:
      return a;
  }
}

PerturbationDist direction_dist(Algorithm a, double eta, double eps) {
  switch (a) {
    case Algorithm::OneSPSA:
    case Algorithm::TwoSPSA:
      return PerturbationDist::sym_bernoulli();
    case Algorithm::OneRDSAUnif:
    case Algorithm::TwoRDSAUnif:
      return PerturbationDist::uniform_sym(eta);
    case Algorithm::OneRDSAAsymBer:
    case Algorithm::TwoRDSAAsymBer:
      return PerturbationDist::asym_bernoulli(eps);
    case Algorithm::OneRDSAGauss:
      return PerturbationDist::gaussian();
  }
  throw ConfigError("unknown algorithm");
}

Eigen::VectorXd first_order_grad(Algorithm a, double yp, double ym,
                                 const Eigen::VectorXd& d, double delta,
                                 double eta, double eps) {
  switch (first_order_counterpart(a)) {
    case Algorithm::OneSPSA:
      return grad_spsa(yp, ym, d, delta).g;
    case Algorithm::OneRDSAUnif:
      return grad_rdsa_unif(yp, ym, d, delta, eta).g;
    case Algorithm::OneRDSAAsymBer:
      return grad_rdsa_asymber(yp, ym, d, delta, eps).g;
    case Algorithm::OneRDSAGauss:
      return grad_rdsa_gauss(yp, ym, d, delta).g;
    default:
      throw ConfigError("not a first-order algorithm");
  }
}

double median_ascending(const Eigen::VectorXd& w) {
  const long n = w.size();
  return n % 2 == 1 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
}

// Shared by the first-order algorithms and the warm-start phase. Returns the
// final iterate; accumulates post-update iterates into *sum when given.
Eigen::VectorXd first_order_loop(const AlgorithmConfig& cfg, Algorithm algo,
                                 const Schedule& sched, long iters,
                                 Eigen::VectorXd x, NoisyOracle& oracle,
                                 RandomStream& rng, Eigen::VectorXd* sum) {
  const PerturbationDist dist = direction_dist(algo, cfg.eta, cfg.eps);
  for (long n = 1; n <= iters; ++n) {
    const double a_n = sched.a(n);
    const double delta_n = sched.delta(n);
    const Eigen::VectorXd d = sample_direction(dist, cfg.dim, rng);
    const double yp = oracle.measure(x + delta_n * d);
    const double ym = oracle.measure(x - delta_n * d);
    const Eigen::VectorXd g =
        first_order_grad(algo, yp, ym, d, delta_n, cfg.eta, cfg.eps);
    x = project_box(x - a_n * g, cfg.box_lo, cfg.box_hi);
    if (sum) *sum += x;
  }
  return x;
}

Eigen::VectorXd newton_step_eigshrink(const Eigen::MatrixXd& hbar,
                                      const Eigen::VectorXd& g, double a_n,
                                      long n, const ConditioningParams& p) {
  const EigenSym e = eigen_sym(hbar);
  const double anchor = median_ascending(e.values);
  const double c = static_cast<double>(n) / (static_cast<double>(n) + p.shrink_n0);
  const Eigen::ArrayXd lt = anchor + c * (e.values.array() - anchor);
  const double ridge = std::max(p.ridge_min, p.ridge0 / static_cast<double>(n));
  const Eigen::ArrayXd lp = (lt.square() + ridge).sqrt();
  Eigen::VectorXd step =
      a_n * (e.vectors * ((e.vectors.transpose() * g).array() / lp).matrix());
  const double peak = step.cwiseAbs().maxCoeff();
  if (peak > p.step_clamp) step *= p.step_clamp / peak;
  return step;
}

}  // namespace

BudgetPlan plan_budget(const AlgorithmConfig& cfg) {
  if (!is_second_order(cfg.algorithm)) {
    const long iters = static_cast<long>(cfg.budget / 2);
    return {0, iters, 2LL * iters};
  }
  const long long warm_budget =
      static_cast<long long>(cfg.warm_fraction * static_cast<double>(cfg.budget));
  const long warm_iters = static_cast<long>(warm_budget / 2);
  const long long warm_spent = 2LL * warm_iters;
  const long long per = cfg.algorithm == Algorithm::TwoSPSA ? 4 : 3;
  const long main_iters = static_cast<long>((cfg.budget - warm_spent) / per);
  return {warm_iters, main_iters, warm_spent + per * main_iters};
}

AlgorithmConfig default_config(Algorithm algo, int dim) {
  AlgorithmConfig cfg;
  cfg.algorithm = algo;
  cfg.dim = dim;
  cfg.schedule =
      is_second_order(algo) ? second_order_schedule() : first_order_schedule();
  cfg.warm_schedule = first_order_schedule();
  cfg.eps = algo == Algorithm::OneRDSAAsymBer ? 1e-4 : 1.0;
  cfg.x0 = Eigen::VectorXd::Ones(dim);
  return cfg;
}

void validate(const AlgorithmConfig& cfg) {
  if (cfg.dim < 1) throw ConfigError("dim must be >= 1");
  if (cfg.budget < 2) throw ConfigError("budget must be >= 2");
  if (!(cfg.box_lo < cfg.box_hi)) throw ConfigError("box_lo must be < box_hi");
  if (!(cfg.warm_fraction >= 0.0) || !(cfg.warm_fraction < 1.0))
    throw ConfigError("warm_fraction must lie in [0, 1)");
  if (!(cfg.schedule.a0 >= 0.0) || !std::isfinite(cfg.schedule.a0))
    throw ConfigError("schedule a0 must be finite and >= 0");
  if (!(cfg.schedule.delta0 > 0.0))
    throw ConfigError("schedule delta0 must be > 0");
  if (cfg.x0.size() != 0 && cfg.x0.size() != cfg.dim)
    throw ConfigError("x0 dimension does not match dim");
  validate(direction_dist(cfg.algorithm, cfg.eta, cfg.eps));
  if (is_second_order(cfg.algorithm)) {
    const ConditioningParams& p = cfg.conditioning;
    if (!(p.shrink_n0 >= 0.0) || !(p.ridge0 >= 0.0) || !(p.ridge_min > 0.0) ||
        !(p.step_clamp > 0.0))
      throw ConfigError("invalid conditioning parameters");
  }
  if (plan_budget(cfg).main_iters < 1)
    throw ConfigError("budget too small for at least one iteration");
}

RunState run(const AlgorithmConfig& cfg, NoisyOracle& oracle,
             RandomStream& dir_rng) {
  validate(cfg);
  if (oracle.objective().dim != cfg.dim)
    throw ConfigError("oracle dimension does not match config");

  const BudgetPlan plan = plan_budget(cfg);
  const long long count_start = oracle.count();

  Eigen::VectorXd x = cfg.x0.size() == 0
                          ? Eigen::VectorXd::Ones(cfg.dim).eval()
                          : cfg.x0;
  x = project_box(std::move(x), cfg.box_lo, cfg.box_hi);

  RunState state;
  state.warm_iters = plan.warm_iters;
  state.iters = plan.main_iters;

  if (!is_second_order(cfg.algorithm)) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(cfg.dim);
    x = first_order_loop(cfg, cfg.algorithm, cfg.schedule, plan.main_iters, x,
                         oracle, dir_rng,
                         cfg.iterate_averaging ? &sum : nullptr);
    state.x = x;
    state.x_reported = cfg.iterate_averaging && plan.main_iters > 0
                           ? (sum / plan.main_iters).eval()
                           : x;
  } else {
    // Warm start: plain first-order run of the matching algorithm, first-order
    // schedule, same perturbation parameters. Only the iterate carries over.
    x = first_order_loop(cfg, first_order_counterpart(cfg.algorithm),
                         cfg.warm_schedule, plan.warm_iters, x, oracle,
                         dir_rng, nullptr);

    const PerturbationDist dist =
        direction_dist(cfg.algorithm, cfg.eta, cfg.eps);
    if (!supports_second_order(dist))
      throw ConfigError("perturbation distribution lacks the moment "
                        "properties required for Hessian estimation");
    Eigen::MatrixXd hbar = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(cfg.dim);

    for (long n = 1; n <= plan.main_iters; ++n) {
      const double a_n = cfg.schedule.a(n);
      const double delta_n = cfg.schedule.delta(n);

      Eigen::VectorXd g;
      Eigen::MatrixXd hhat;
      if (cfg.algorithm == Algorithm::TwoSPSA) {
        const Eigen::VectorXd dd = sample_direction(dist, cfg.dim, dir_rng);
        const Eigen::VectorXd dt = sample_direction(dist, cfg.dim, dir_rng);
        // Secondary offset reuses delta_n; the estimate only needs the two
        // probes to differ by delta_n * dt.
        const double yp = oracle.measure(x + delta_n * dd);
        const double ypt = oracle.measure(x + delta_n * dd + delta_n * dt);
        const double ym = oracle.measure(x - delta_n * dd);
        const double ymt = oracle.measure(x - delta_n * dd + delta_n * dt);
        auto [ge, he] = hess_2spsa(yp, ypt, ym, ymt, dd, dt, delta_n, delta_n);
        g = std::move(ge.g);
        hhat = std::move(he.h);
      } else {
        const Eigen::VectorXd d = sample_direction(dist, cfg.dim, dir_rng);
        const double yc = oracle.measure(x);
        const double yp = oracle.measure(x + delta_n * d);
        const double ym = oracle.measure(x - delta_n * d);
        if (cfg.algorithm == Algorithm::TwoRDSAUnif) {
          g = grad_rdsa_unif(yp, ym, d, delta_n, cfg.eta).g;
          hhat = hess_rdsa_unif(yc, yp, ym, d, delta_n, cfg.eta).h;
        } else {
          g = grad_rdsa_asymber(yp, ym, d, delta_n, cfg.eps).g;
          hhat = hess_rdsa_asymber(yc, yp, ym, d, delta_n, cfg.eps).h;
        }
      }

      hbar = smooth_hessian(hbar, hhat, n);

      Eigen::VectorXd step;
      if (cfg.conditioning.mode == Conditioning::EigShrink) {
        step = newton_step_eigshrink(hbar, g, a_n, n, cfg.conditioning);
      } else {
        const Eigen::MatrixXd upsilon = project_pd(hbar, delta_n);
        try {
          step = a_n * solve_pd(upsilon, g);
        } catch (const NumericalError&) {
          step = a_n * g;
          ++state.solve_fallbacks;
        }
      }
      x = project_box(x - step, cfg.box_lo, cfg.box_hi);
      if (cfg.iterate_averaging) sum += x;
    }

    state.x = x;
    state.x_reported = cfg.iterate_averaging && plan.main_iters > 0
                           ? (sum / plan.main_iters).eval()
                           : x;
    state.hbar = std::move(hbar);
  }

  state.measurements = oracle.count() - count_start;
  if (state.measurements != plan.spent)
    throw NumericalError("measurement ledger mismatch");
  return state;
}

}  // namespace rdsa
