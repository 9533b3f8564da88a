#include "rdsa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rdsa/errors.hpp"
#include "rdsa/objectives.hpp"

namespace rdsa {

namespace {

const std::vector<Algorithm> kBenchmarkAlgos = {
    Algorithm::OneSPSA,    Algorithm::OneRDSAUnif, Algorithm::OneRDSAAsymBer,
    Algorithm::TwoSPSA,    Algorithm::TwoRDSAUnif, Algorithm::TwoRDSAAsymBer,
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double resolve_eps(const ExperimentSpec& spec, Algorithm algo,
                   std::optional<double> cell_eps) {
  if (cell_eps) return *cell_eps;
  if (algo == Algorithm::OneRDSAAsymBer) return spec.eps_first.value_or(1e-4);
  if (algo == Algorithm::TwoRDSAAsymBer) return spec.eps_second.value_or(1.0);
  return 0.0;
}

bool uses_eps(Algorithm algo) {
  return algo == Algorithm::OneRDSAAsymBer || algo == Algorithm::TwoRDSAAsymBer;
}

AlgorithmConfig make_cell_config(const ExperimentSpec& spec, Algorithm algo,
                                 long long budget,
                                 std::optional<double> cell_eps) {
  AlgorithmConfig cfg = default_config(algo, spec.dim);
  cfg.budget = budget;
  cfg.eta = spec.eta;
  cfg.iterate_averaging = spec.iterate_averaging;
  if (uses_eps(algo)) cfg.eps = resolve_eps(spec, algo, cell_eps);
  if (is_second_order(algo)) {
    if (spec.second_schedule) cfg.schedule = *spec.second_schedule;
    if (spec.first_schedule) cfg.warm_schedule = *spec.first_schedule;
  } else if (spec.first_schedule) {
    cfg.schedule = *spec.first_schedule;
  }
  return cfg;
}

std::vector<CellOverride> expand_cells(const ExperimentSpec& spec) {
  if (!spec.explicit_cells.empty()) return spec.explicit_cells;
  std::vector<CellOverride> cells;
  const std::vector<Algorithm>& algos =
      spec.algorithms.empty() ? kBenchmarkAlgos : spec.algorithms;
  for (long long budget : spec.budgets)
    for (Algorithm algo : algos)
      cells.push_back(CellOverride{algo, budget, std::nullopt});
  return cells;
}

CellResult run_cell(const ExperimentSpec& spec, const Objective& obj,
                    Algorithm algo, long long budget,
                    std::optional<double> cell_eps,
                    const std::string& label_suffix) {
  const AlgorithmConfig cfg = make_cell_config(spec, algo, budget, cell_eps);
  validate(cfg);
  const BudgetPlan plan = plan_budget(cfg);

  const Eigen::VectorXd x0 = cfg.x0;
  const double f0 = obj.eval(x0);
  double nmse_denom = 0.0;
  if (obj.xstar) nmse_denom = (x0 - *obj.xstar).squaredNorm();
  if (spec.metric == "nmse" && !(nmse_denom > 0.0))
    throw ConfigError("NMSE undefined: x0 coincides with the optimum");
  if (spec.metric == "normf" && f0 == 0.0)
    throw ConfigError("normalized f undefined: f(x0) = 0");

  const int reps = spec.replications;
  std::vector<double> nmse(reps, 0.0), normf(reps, 0.0);

  const auto t0 = std::chrono::steady_clock::now();
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        RandomStream dir(spec.seed, 2ull * static_cast<std::uint64_t>(r));
        RandomStream noise(spec.seed, 2ull * static_cast<std::uint64_t>(r) + 1);
        NoisyOracle oracle(obj, spec.sigma, noise);
        const RunState st = run(cfg, oracle, dir);
        if (st.measurements != plan.spent)
          throw NumericalError("cell measurement audit failed");
        const Eigen::VectorXd& xe = st.x_reported;
        if (obj.xstar) nmse[r] = (xe - *obj.xstar).squaredNorm() / nmse_denom;
        normf[r] = obj.eval(xe) / f0;
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int threads = std::min(resolve_parallelism(spec.parallel), reps);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  CellResult out;
  out.objective = obj.name;
  out.algorithm_label = algorithm_name(algo) + label_suffix;
  out.sigma = spec.sigma;
  out.budget = budget;
  out.n_end = plan.main_iters;
  out.replications = reps;
  out.seed = spec.seed;
  out.epsilon = uses_eps(algo) ? resolve_eps(spec, algo, cell_eps) : 0.0;
  out.metric = spec.metric;
  out.nmse = std::move(nmse);
  out.normf = std::move(normf);
  out.measurements_per_rep = plan.spent;

  // Deterministic reduction in replication-index order.
  const std::vector<double>& vals =
      spec.metric == "normf" ? out.normf : out.nmse;
  double sum = 0.0;
  for (double v : vals) sum += v;
  out.mean = sum / reps;
  if (reps > 1) {
    double ss = 0.0;
    for (double v : vals) ss += (v - out.mean) * (v - out.mean);
    out.stderr_mean = std::sqrt(ss / (reps - 1)) / std::sqrt(double(reps));
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.replications < 1) throw ConfigError("replications must be >= 1");
  if (spec.metric != "nmse" && spec.metric != "normf")
    throw ConfigError("metric must be nmse or normf");
  if (spec.output_format != "csv" && spec.output_format != "markdown" &&
      spec.output_format != "jsonl")
    throw ConfigError("format must be csv, markdown, or jsonl");
  const Objective obj = make_objective(spec.objective_id, spec.dim);
  if (spec.metric == "nmse" && !obj.xstar)
    throw ConfigError("metric nmse requires an objective with a known "
                      "optimum; use metric=normf");
  const std::vector<CellOverride> cells = expand_cells(spec);
  if (cells.empty()) throw ConfigError("no experiment cells configured");
  for (const CellOverride& c : cells) {
    try {
      validate(make_cell_config(spec, c.algorithm, c.budget, c.eps));
    } catch (const ConfigError& e) {
      throw ConfigError("cell " + algorithm_name(c.algorithm) + " budget=" +
                        std::to_string(c.budget) + ": " + e.what());
    }
  }
}

std::vector<CellResult> run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const Objective obj = make_objective(spec.objective_id, spec.dim);
  std::vector<CellResult> results;
  for (const CellOverride& c : expand_cells(spec))
    results.push_back(run_cell(spec, obj, c.algorithm, c.budget, c.eps, ""));
  return results;
}

std::vector<CellResult> sweep_epsilon(const ExperimentSpec& spec,
                                      const std::vector<double>& grid) {
  validate(spec);
  const std::vector<CellOverride> cells = expand_cells(spec);
  for (const CellOverride& c : cells)
    if (!uses_eps(c.algorithm))
      throw ConfigError("sweep requires asymmetric Bernoulli algorithms, got " +
                        algorithm_name(c.algorithm));
  for (double e : grid)
    if (!(e > 0.0) || !std::isfinite(e))
      throw ConfigError("sweep eps values must be finite and > 0");

  const Objective obj = make_objective(spec.objective_id, spec.dim);
  std::vector<CellResult> results;
  for (const CellOverride& c : cells)
    for (double e : grid)
      results.push_back(run_cell(spec, obj, c.algorithm, c.budget, e,
                                 "@eps=" + fmt_short(e)));
  return results;
}

void emit_csv(std::ostream& os, const std::vector<CellResult>& results) {
  os << "objective,algorithm,sigma,budget,n_end,replications,metric,mean,"
        "stderr,seed\n";
  for (const CellResult& r : results) {
    os << r.objective << ',' << r.algorithm_label << ',' << fmt17(r.sigma)
       << ',' << r.budget << ',' << r.n_end << ',' << r.replications << ','
       << r.metric << ',' << fmt17(r.mean) << ',' << fmt17(r.stderr_mean)
       << ',' << r.seed << '\n';
  }
}

void emit_markdown(std::ostream& os, const std::vector<CellResult>& results) {
  // One pivot table per (objective, sigma, metric): budgets down, algorithms
  // across, mirroring the usual benchmark-table layout.
  struct Group {
    std::string key, title;
    std::vector<std::string> algos;
    std::vector<long long> budgets;
  };
  std::vector<Group> groups;
  auto find_group = [&](const CellResult& r) -> Group& {
    const std::string key =
        r.objective + '|' + fmt17(r.sigma) + '|' + r.metric;
    for (Group& g : groups)
      if (g.key == key) return g;
    groups.push_back(Group{
        key,
        r.objective + ", sigma=" + fmt_short(r.sigma) + ", " + r.metric,
        {},
        {}});
    return groups.back();
  };
  for (const CellResult& r : results) {
    Group& g = find_group(r);
    if (std::find(g.algos.begin(), g.algos.end(), r.algorithm_label) ==
        g.algos.end())
      g.algos.push_back(r.algorithm_label);
    if (std::find(g.budgets.begin(), g.budgets.end(), r.budget) ==
        g.budgets.end())
      g.budgets.push_back(r.budget);
  }
  auto cell_text = [&](const Group& g, long long budget,
                       const std::string& algo) -> std::string {
    for (const CellResult& r : results) {
      if (r.objective + '|' + fmt17(r.sigma) + '|' + r.metric != g.key)
        continue;
      if (r.budget != budget || r.algorithm_label != algo) continue;
      char buf[96];
      std::snprintf(buf, sizeof buf, "%.3e ± %.2e", r.mean, r.stderr_mean);
      return buf;
    }
    return "-";
  };
  for (const Group& g : groups) {
    os << "### " << g.title << "\n\n";
    os << "| budget |";
    for (const std::string& a : g.algos) os << ' ' << a << " |";
    os << "\n|---:|";
    for (size_t i = 0; i < g.algos.size(); ++i) os << "---:|";
    os << '\n';
    for (long long b : g.budgets) {
      os << "| " << b << " |";
      for (const std::string& a : g.algos) os << ' ' << cell_text(g, b, a) << " |";
      os << '\n';
    }
    os << '\n';
  }
}

void emit_jsonl(std::ostream& os, const std::vector<CellResult>& results) {
  for (const CellResult& r : results) {
    nlohmann::ordered_json j;
    j["objective"] = r.objective;
    j["algorithm"] = r.algorithm_label;
    j["sigma"] = r.sigma;
    j["budget"] = r.budget;
    j["n_end"] = r.n_end;
    j["replications"] = r.replications;
    j["seed"] = r.seed;
    j["epsilon"] = r.epsilon;
    j["metric"] = r.metric;
    j["mean"] = r.mean;
    j["stderr"] = r.stderr_mean;
    j["measurements_per_rep"] = r.measurements_per_rep;
    j["nmse"] = r.nmse;
    j["normf"] = r.normf;
    j["wall_seconds"] = r.wall_seconds;
    os << j.dump() << '\n';
  }
}

void emit(const std::vector<CellResult>& results, const std::string& format,
          const std::string& path) {
  std::ofstream file;
  const bool to_stdout = path.empty() || path == "-";
  if (!to_stdout) {
    file.open(path, std::ios::out | std::ios::trunc);
    if (!file) throw IoError("cannot open output file: " + path);
  }
  std::ostream& os = to_stdout ? std::cout : file;
  if (format == "csv")
    emit_csv(os, results);
  else if (format == "markdown")
    emit_markdown(os, results);
  else if (format == "jsonl")
    emit_jsonl(os, results);
  else
    throw ConfigError("unknown output format: " + format);
  os.flush();
  if (!os.good()) throw IoError("write failed" + (to_stdout ? "" : ": " + path));
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": " + v);
  }
}

long long parse_ll(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("invalid integer for " + key + ": " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": " + v);
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Pending [cell] section being accumulated.
struct PendingCell {
  bool active = false;
  std::optional<Algorithm> algo;
  std::optional<long long> budget;
  std::optional<double> eps;
};

void flush_cell(PendingCell& pc, ExperimentSpec& spec) {
  if (!pc.active) return;
  if (!pc.algo || !pc.budget)
    throw ConfigError("config cell section needs both algo and budget");
  spec.explicit_cells.push_back(CellOverride{*pc.algo, *pc.budget, pc.eps});
  pc = PendingCell{};
}

// Schedule override keys like first.a0 / second.delta0 build on the
// benchmark defaults.
bool apply_schedule_key(const std::string& key, const std::string& value,
                        ExperimentSpec& spec) {
  auto apply = [&](std::optional<Schedule>& slot, Schedule defaults,
                   const std::string& field) {
    if (!slot) slot = defaults;
    if (field == "a0")
      slot->a0 = parse_double(key, value);
    else if (field == "stability")
      slot->stability = parse_double(key, value);
    else if (field == "alpha")
      slot->alpha = parse_double(key, value);
    else if (field == "delta0")
      slot->delta0 = parse_double(key, value);
    else if (field == "gamma")
      slot->gamma = parse_double(key, value);
    else
      throw ConfigError("unknown schedule field: " + key);
  };
  if (key.rfind("first.", 0) == 0) {
    apply(spec.first_schedule, first_order_schedule(), key.substr(6));
    return true;
  }
  if (key.rfind("second.", 0) == 0) {
    apply(spec.second_schedule, second_order_schedule(), key.substr(7));
    return true;
  }
  return false;
}

void apply_global_key(const std::string& key, const std::string& value,
                      ExperimentSpec& spec) {
  if (key == "objective")
    spec.objective_id = value;
  else if (key == "dim")
    spec.dim = static_cast<int>(parse_ll(key, value));
  else if (key == "sigma")
    spec.sigma = parse_double(key, value);
  else if (key == "algos" || key == "algorithms") {
    spec.algorithms.clear();
    for (const std::string& a : split_csv(value))
      spec.algorithms.push_back(parse_algorithm(a));
  } else if (key == "budgets" || key == "budget") {
    spec.budgets.clear();
    for (const std::string& b : split_csv(value))
      spec.budgets.push_back(parse_ll(key, b));
  } else if (key == "reps" || key == "replications")
    spec.replications = static_cast<int>(parse_ll(key, value));
  else if (key == "seed")
    spec.seed = static_cast<std::uint64_t>(parse_ll(key, value));
  else if (key == "eta")
    spec.eta = parse_double(key, value);
  else if (key == "epsilon") {
    spec.eps_first = parse_double(key, value);
    spec.eps_second = spec.eps_first;
  } else if (key == "eps-first")
    spec.eps_first = parse_double(key, value);
  else if (key == "eps-second")
    spec.eps_second = parse_double(key, value);
  else if (key == "metric")
    spec.metric = value;
  else if (key == "averaging")
    spec.iterate_averaging = parse_bool(key, value);
  else if (key == "parallel")
    spec.parallel = static_cast<int>(parse_ll(key, value));
  else if (key == "format")
    spec.output_format = value;
  else if (key == "out")
    spec.output_path = value;
  else if (!apply_schedule_key(key, value, spec))
    throw ConfigError("unknown config key: " + key);
}

}  // namespace

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  ExperimentSpec spec;
  PendingCell pc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      flush_cell(pc, spec);
      pc.active = true;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key or value");
    if (pc.active) {
      if (key == "algo" || key == "algorithm")
        pc.algo = parse_algorithm(value);
      else if (key == "budget")
        pc.budget = parse_ll(key, value);
      else if (key == "epsilon")
        pc.eps = parse_double(key, value);
      else
        throw ConfigError("unknown cell key: " + key);
    } else {
      apply_global_key(key, value, spec);
    }
  }
  flush_cell(pc, spec);
  return spec;
}

int resolve_parallelism(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RDSA_PARALLEL")) {
    int v = 0;
    auto [p, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    if (ec == std::errc() && v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace rdsa
