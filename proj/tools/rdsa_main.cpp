#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rdsa/errors.hpp"
#include "rdsa/harness.hpp"
#include "rdsa/theory.hpp"

namespace {

// Flag holders shared by run and sweep. Values are applied on top of the
// config-file spec only when the flag was actually given.
struct CommonFlags {
  std::string config;
  std::string objective;
  int dim = 0;
  double sigma = 0.0;
  std::vector<std::string> algos;
  std::vector<long long> budgets;
  int reps = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double eta = 0.0;
  std::string metric;
  bool averaging = false;
  int parallel = 0;
  std::string format;
  std::string out;

  CLI::Option* o_objective = nullptr;
  CLI::Option* o_dim = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_algos = nullptr;
  CLI::Option* o_budgets = nullptr;
  CLI::Option* o_reps = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_epsilon = nullptr;
  CLI::Option* o_eta = nullptr;
  CLI::Option* o_metric = nullptr;
  CLI::Option* o_averaging = nullptr;
  CLI::Option* o_parallel = nullptr;
  CLI::Option* o_format = nullptr;
  CLI::Option* o_out = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "config file (flags override it)");
  f.o_objective = cmd->add_option("--objective", f.objective,
                                  "quadratic or fourth-order");
  f.o_dim = cmd->add_option("--dim", f.dim, "problem dimension");
  f.o_sigma = cmd->add_option("--sigma", f.sigma, "noise level");
  f.o_algos = cmd->add_option("--algo", f.algos,
                              "algorithm name, repeatable or comma list")
                  ->delimiter(',');
  f.o_budgets = cmd->add_option("--budget", f.budgets,
                                "measurement budget, repeatable or comma list")
                    ->delimiter(',');
  f.o_reps = cmd->add_option("--reps", f.reps, "replications per cell");
  f.o_seed = cmd->add_option("--seed", f.seed, "base seed");
  f.o_epsilon = cmd->add_option("--epsilon", f.epsilon,
                                "asymmetric Bernoulli parameter");
  f.o_eta = cmd->add_option("--eta", f.eta, "uniform perturbation half-width");
  f.o_metric = cmd->add_option("--metric", f.metric, "nmse or normf");
  f.o_averaging = cmd->add_flag("--averaging", f.averaging,
                                "report averaged iterates");
  f.o_parallel = cmd->add_option("--parallel", f.parallel,
                                 "worker threads (default: RDSA_PARALLEL or "
                                 "hardware)");
  f.o_format = cmd->add_option("--format", f.format,
                               "csv, markdown, or jsonl");
  f.o_out = cmd->add_option("--out", f.out, "output file, '-' for stdout");
}

rdsa::ExperimentSpec build_spec(const CommonFlags& f) {
  rdsa::ExperimentSpec spec;
  if (!f.config.empty()) spec = rdsa::parse_config_file(f.config);
  if (f.o_objective->count()) spec.objective_id = f.objective;
  if (f.o_dim->count()) spec.dim = f.dim;
  if (f.o_sigma->count()) spec.sigma = f.sigma;
  if (f.o_algos->count()) {
    spec.algorithms.clear();
    spec.explicit_cells.clear();
    for (const std::string& a : f.algos)
      spec.algorithms.push_back(rdsa::parse_algorithm(a));
  }
  if (f.o_budgets->count()) {
    spec.budgets = f.budgets;
    spec.explicit_cells.clear();
  }
  if (f.o_reps->count()) spec.replications = f.reps;
  if (f.o_seed->count()) spec.seed = f.seed;
  if (f.o_epsilon->count()) {
    spec.eps_first = f.epsilon;
    spec.eps_second = f.epsilon;
  }
  if (f.o_eta->count()) spec.eta = f.eta;
  if (f.o_metric->count()) spec.metric = f.metric;
  if (f.o_averaging->count()) spec.iterate_averaging = f.averaging;
  if (f.o_parallel->count()) spec.parallel = f.parallel;
  if (f.o_format->count()) spec.output_format = f.format;
  if (f.o_out->count()) spec.output_path = f.out;
  return spec;
}

void print_theory_report(const std::string& objective_id, int dim, double eps,
                         double sigma, double a0, double delta0, double alpha,
                         double gamma, double rho) {
  using namespace rdsa;
  const Objective obj = make_objective(objective_id, dim);
  if (!obj.xstar || !obj.hess)
    throw ConfigError("theory report needs an objective with a known optimum "
                      "and analytic Hessian");
  AsymptoticInputs in;
  in.hessian_at_opt = obj.hess(*obj.xstar);
  in.third_deriv_contraction = third_deriv_T(obj);
  in.noise_variance = sigma * sigma;
  in.a0 = a0;
  in.delta0 = delta0;
  in.alpha = alpha;
  in.gamma = gamma;
  in.eps = eps;

  const PerturbationDist ab = PerturbationDist::asym_bernoulli(eps);
  std::printf("perturbation constants (eps=%g)\n", eps);
  std::printf("  k_mu(Unif)        = %.10g\n", k_mu_unif());
  std::printf("  k_mu(AsymBer)     = %.10g\n", k_mu_asymber(eps));
  std::printf("  m4/m2^2 (AsymBer) = %.10g\n", fourth_moment_ratio(ab));
  const auto mr = measurement_ratio(eps);
  std::printf("  measurement ratio = %g : %g : %g : %g"
              "  (Unif : AsymBer : Gauss : SPSA)\n",
              mr[0], mr[1], mr[2], mr[3]);

  std::printf("\nobjective %s, dim=%d, sigma=%g, a0=%g, delta0=%g, "
              "alpha=%g, gamma=%g\n",
              obj.name.c_str(), dim, sigma, a0, delta0, alpha, gamma);
  std::printf("  ||T|| = %.10g\n", in.third_deriv_contraction.norm());
  struct Row {
    const char* label;
    AmseVariant v;
  };
  const Row rows[] = {
      {"1RDSA-Unif", AmseVariant::OneRDSAUnif},
      {"1RDSA-AsymBer", AmseVariant::OneRDSAAsymBer},
      {"1RDSA-Unif-Avg", AmseVariant::OneRDSAUnifAvg},
      {"2RDSA-Unif", AmseVariant::TwoRDSAUnif},
      {"2RDSA-AsymBer", AmseVariant::TwoRDSAAsymBer},
      {"2SPSA", AmseVariant::TwoSPSA},
  };
  std::printf("  AMSE:\n");
  for (const Row& r : rows) {
    // Plain first-order variants need a0 > beta / (2 lambda_min); report the
    // violation per row instead of aborting the whole table.
    try {
      std::printf("    %-15s %.10g\n", r.label, amse(r.v, in));
    } catch (const ConfigError& e) {
      std::printf("    %-15s undefined (%s)\n", r.label, e.what());
    }
  }
  const ABTerms abt = ab_terms(in);
  std::printf("  (A) = %.10g, (B) = %.10g\n", abt.a_term, abt.b_term);
  std::printf("  nhat 2RDSA-Unif / 2SPSA    = %.10g\n", nhat_ratio_unif(in));
  std::printf("  nhat 2RDSA-AsymBer / 2SPSA = %.10g\n",
              nhat_ratio_asymber(in));
  const Eigen::MatrixXd omega = omega_covariance(in, rho);
  std::printf("  trace(Omega) at rho=%g     = %.10g\n", rho, omega.trace());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"derivative-free stochastic optimization benchmarks"};
  app.require_subcommand(1);

  CLI::App* run_cmd = app.add_subcommand("run", "run benchmark cells");
  CommonFlags run_flags;
  add_common_flags(run_cmd, run_flags);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "eps sensitivity sweep (AsymBer only)");
  CommonFlags sweep_flags;
  add_common_flags(sweep_cmd, sweep_flags);
  std::vector<double> grid;
  sweep_cmd->add_option("--grid", grid, "eps values, comma list")
      ->delimiter(',')
      ->required();

  CLI::App* theory_cmd =
      app.add_subcommand("theory", "print asymptotic constants and AMSE");
  std::string th_objective = "quadratic";
  int th_dim = 10;
  double th_eps = 0.01, th_sigma = 0.001, th_a0 = 1.0, th_delta0 = 1.0;
  double th_alpha = 1.0, th_gamma = 1.0 / 6.0, th_rho = 1.0;
  theory_cmd->add_option("--objective", th_objective, "objective name");
  theory_cmd->add_option("--dim", th_dim, "problem dimension");
  theory_cmd->add_option("--epsilon", th_eps, "asymmetric Bernoulli parameter");
  theory_cmd->add_option("--sigma", th_sigma, "noise level");
  theory_cmd->add_option("--a0", th_a0, "step-size constant");
  theory_cmd->add_option("--delta0", th_delta0, "perturbation constant");
  theory_cmd->add_option("--alpha", th_alpha, "step-size exponent");
  theory_cmd->add_option("--gamma", th_gamma, "perturbation exponent");
  theory_cmd->add_option("--rho", th_rho, "step lower-bound constant");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) {
      const rdsa::ExperimentSpec spec = build_spec(run_flags);
      const std::vector<rdsa::CellResult> results = rdsa::run_experiment(spec);
      rdsa::emit(results, spec.output_format, spec.output_path);
    } else if (sweep_cmd->parsed()) {
      const rdsa::ExperimentSpec spec = build_spec(sweep_flags);
      const std::vector<rdsa::CellResult> results =
          rdsa::sweep_epsilon(spec, grid);
      rdsa::emit(results, spec.output_format, spec.output_path);
    } else if (theory_cmd->parsed()) {
      print_theory_report(th_objective, th_dim, th_eps, th_sigma, th_a0,
                          th_delta0, th_alpha, th_gamma, th_rho);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const rdsa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const rdsa::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const rdsa::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
