#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catopt/classic.hpp"
#include "catopt/corpus.hpp"
#include "catopt/solver.hpp"

namespace catopt {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SolverKind { cat, cat_theta0, classic };

struct SolverSpec {
  std::string name;  // unique label within a suite
  SolverKind kind = SolverKind::cat;
  CatConfig cat;
  ClassicConfig classic;
};

SolverSpec make_solver_spec(const std::string& name);  // cat | cat_theta0 | classic

struct SuiteSpec {
  std::vector<ProblemInstance> problems;
  std::vector<SolverSpec> solvers;
  double eps = 1e-5;
  int max_iter = 10000;
};

struct BenchmarkRecord {
  std::string problem;
  std::string solver;
  Status status = Status::iteration_limit;
  int iters = 0;
  long fevals = 0;
  long gevals = 0;
  long hevals = 0;
  double final_grad_norm = 0.0;
  double wall_time_seconds = 0.0;
  std::optional<double> optimality_gap;  // f(x_final) - f_star when known
  int max_iter = 0;                      // cap in force, used as failure substitute
  int certificate_violations = 0;
  int invariant_violations = 0;  // descent + radius-law audit failures
};

// Runs every (problem, solver) pair, deterministic given the instance seeds.
// Results come back sorted by problem label then solver name. A run that
// fails numerically produces a record; it never aborts the suite.
std::vector<BenchmarkRecord> run_suite(const SuiteSpec& spec);

// Geometric mean of iteration counts with `cap` substituted for every
// record that did not converge.
double geometric_mean_iters(const std::vector<BenchmarkRecord>& records, int cap);

struct SolverSummary {
  std::string solver;
  int problems = 0;
  int failures = 0;
  double geomean_iters = 0.0;
  double geomean_fevals = 0.0;
  double geomean_gevals = 0.0;
};

// Per-solver summaries; failures substitute each record's own cap.
std::vector<SolverSummary> summarize(const std::vector<BenchmarkRecord>& records);

struct ProfileCurve {
  std::string solver;
  std::vector<std::pair<int, double>> points;  // (budget t, fraction solved)
};

// Fraction of problems each solver converged on within t iterations, for
// every t in the grid. Requires a common problem set across solvers.
std::vector<ProfileCurve> performance_profile(const std::vector<BenchmarkRecord>& records,
                                              const std::vector<int>& iter_grid);

// Writes records.csv, summary.csv, profile_<solver>.csv and profiles.svg
// into out_dir (created if missing). Returns the written paths.
std::vector<std::string> emit_reports(const std::vector<BenchmarkRecord>& records,
                                      const std::string& out_dir);

void write_records_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SolverSummary>& summaries);
void write_profile_svg(std::ostream& out, const std::vector<ProfileCurve>& curves);

// Log-spaced iteration budgets 1..max, deduplicated, always ending at max.
std::vector<int> default_iter_grid(int max);

// Suite configuration: top-level `eps` / `max_iter` keys, then repeatable
// `[solver <cat|cat_theta0|classic>]` sections with hyperparameter overrides
// and `[problem <name>]` sections with generator parameters. A problem
// section may carry `seeds = a:b` to expand into one instance per seed.
SuiteSpec parse_suite(std::istream& in);
SuiteSpec parse_suite_file(const std::string& path);

}  // namespace catopt
