#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rdsa/optimizer.hpp"

namespace rdsa {

// One explicitly configured (algorithm, budget) cell from a config file
// section; eps overrides the spec-level value for this cell only.
struct CellOverride {
  Algorithm algorithm;
  long long budget;
  std::optional<double> eps;
};

struct ExperimentSpec {
  std::string objective_id = "quadratic";
  int dim = 10;
  double sigma = 0.001;
  std::vector<Algorithm> algorithms;  // empty means the six benchmark algos
  std::vector<long long> budgets = {2000};
  std::vector<CellOverride> explicit_cells;  // when nonempty, replaces the
                                             // algorithms x budgets product
  int replications = 100;
  std::uint64_t seed = 20240101;
  double eta = 1.0;
  // eps used by the asymmetric Bernoulli variants; the unset defaults are
  // 1e-4 first order and 1.0 second order.
  std::optional<double> eps_first;
  std::optional<double> eps_second;
  std::optional<Schedule> first_schedule;
  std::optional<Schedule> second_schedule;
  std::string metric = "nmse";  // or "normf"
  bool iterate_averaging = false;
  int parallel = 0;  // 0: RDSA_PARALLEL env var, else hardware threads
  std::string output_format = "csv";  // csv | markdown | jsonl
  std::string output_path;            // empty or "-" means stdout
};

struct CellResult {
  std::string objective;
  std::string algorithm_label;  // algorithm name, "@eps=..." suffix in sweeps
  double sigma = 0.0;
  long long budget = 0;
  long n_end = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;  // eps actually used (0 when not applicable)
  std::string metric;
  double mean = 0.0;
  double stderr_mean = 0.0;  // sample standard deviation / sqrt(reps)
  std::vector<double> nmse;   // per replication
  std::vector<double> normf;  // per replication
  long long measurements_per_rep = 0;
  double wall_seconds = 0.0;
};

void validate(const ExperimentSpec& spec);

// Runs every configured cell with replication r drawing its direction and
// noise streams from (seed, 2r) and (seed, 2r+1). Replications fan out over
// a worker pool; aggregation always reduces in replication-index order, so
// results do not depend on the worker count.
std::vector<CellResult> run_experiment(const ExperimentSpec& spec);

// One row per eps value for the asymmetric Bernoulli variants listed in the
// spec. Throws ConfigError when a non-AsymBer algorithm is configured.
std::vector<CellResult> sweep_epsilon(const ExperimentSpec& spec,
                                      const std::vector<double>& grid);

void emit_csv(std::ostream& os, const std::vector<CellResult>& results);
void emit_markdown(std::ostream& os, const std::vector<CellResult>& results);
void emit_jsonl(std::ostream& os, const std::vector<CellResult>& results);

// Dispatch on format and write to path (stdout when empty or "-").
void emit(const std::vector<CellResult>& results, const std::string& format,
          const std::string& path);

// Flat key = value text, '#' comments, with optional [cell] sections that
// each define one explicit (algo, budget) cell. See README for the grammar.
ExperimentSpec parse_config_file(const std::string& path);

// Worker-count resolution: explicit > RDSA_PARALLEL > hardware_concurrency.
int resolve_parallelism(int requested);

}  // namespace rdsa
