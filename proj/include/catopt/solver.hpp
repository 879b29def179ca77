#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catopt/objective.hpp"
#include "catopt/trs.hpp"

namespace catopt {

// Hyperparameters of the adaptive trust-region method. The defaults are the
// recommended problem-independent settings; validate_config() checks every
// range plus the compound requirement
//   beta * theta / (gamma3 (1 - beta)) + gamma1 < 1.
struct CatConfig {
  double r1 = 1.0;      // initial radius
  double beta = 0.1;    // ratio threshold for growing the radius
  double theta = 0.1;   // weight of the trial-gradient term in rho_hat (0 disables it)
  double omega = 8.0;   // radius growth/shrink factor
  double gamma1 = 0.0;  // stationarity relaxation
  double gamma2 = 0.8;  // subproblem norm window
  double gamma3 = 1.0;  // model-decrease relaxation
  double eps = 1e-5;    // gradient tolerance
  int max_iter = 10000;
};

void validate_config(const CatConfig& cfg);  // throws ConfigError

// Model value M(d) = 1/2 d'Hd + g'd.
double model_value(const Vector& g, const Matrix& h, const Vector& d);

// Acceptance ratio with the trial-gradient term:
//   rho_hat = (f_k - f_trial) / (-M(d) + theta/2 ||grad f(x+d)|| ||d||).
// A zero denominator (only possible for d = 0 with zero model value) returns
// +infinity; the driver treats that as a termination signal, not a fault.
double rho_hat(double f_k, double f_trial, double m_val, double grad_trial_norm,
               double d_norm, double theta);

struct IterationRecord {
  int k = 0;
  double f = 0.0;            // f(x_k)
  double grad_norm = 0.0;    // ||grad f(x_k)||
  double r = 0.0;            // radius used this iteration
  double d_norm = 0.0;
  double delta = 0.0;
  double rho_hat = 0.0;
  bool accepted = false;
  double grad_trial_norm = 0.0;
  long fevals = 0;  // cumulative evaluation counts after this iteration
  long gevals = 0;
  long hevals = 0;
  // Not part of the CSV schema:
  bool certificates_ok = true;
  trs::SolvePath path = trs::SolvePath::newton;
};

struct Trace {
  std::vector<IterationRecord> records;
  // x_1 followed by the iterate after every accepted step; the final
  // converged point is appended even if that last step increased f.
  std::vector<Vector> accepted_iterates;
  double max_trial_inf_norm = 0.0;
};

enum class Status { converged, iteration_limit, numerical_failure };

const char* to_string(Status s);

struct SolveResult {
  Status status = Status::iteration_limit;
  std::string failure_reason;
  Vector x_final;
  int iterations = 0;
  Trace trace;
};

struct SolverState {
  int k = 1;
  Vector x;
  double r = 0.0;
  double delta_warm = 0.0;
  double f_x = 0.0;
  Vector g_x;
  Matrix h_x;
  bool h_valid = false;
  long fevals = 0;
  long gevals = 0;
  long hevals = 0;
  int consecutive_nonfinite = 0;
};

struct StepResult {
  bool has_record = true;  // false when the iteration aborted before solving
  IterationRecord record;
  Vector x_trial;
  std::optional<Status> stop;
  std::string failure_reason;
};

// One outer iteration: solve the subproblem at state.x, evaluate the trial
// point, terminate if its gradient meets eps, otherwise accept on any
// decrease and set the next radius from ||d||. Advances the state in place.
StepResult step(SolverState& state, const ObjectiveFunction& p, const CatConfig& cfg);

// Runs the method from x1 until convergence, the iteration cap, or a
// numerical failure. Requires a validated config and a finite start point.
SolveResult minimize(const ObjectiveFunction& p, const Vector& x1, const CatConfig& cfg);

// Certificate check against the driver's configured relaxation constants,
// using the measured trial gradient norm.
trs::CertificateReport check_conditions(const Vector& g, const Matrix& h, const Vector& d,
                                        double delta, double r, double grad_trial_norm,
                                        const CatConfig& cfg);

// ---- Trace post-processing -------------------------------------------------

struct TraceAudit {
  int descent_violations = 0;
  int radius_law_violations = 0;
  int certificate_violations = 0;
  bool ok() const {
    return descent_violations == 0 && radius_law_violations == 0 &&
           certificate_violations == 0;
  }
};

// Verifies, record by record, that f never increased across accepted steps,
// that f is bit-identical across rejected ones, and that each next radius is
// exactly omega ||d|| or ||d|| / omega according to the rho_hat branch.
TraceAudit audit_cat_trace(const Trace& trace, const CatConfig& cfg);

// Constant from the gradient bound ||grad f(x+d)|| <= c1 L ||d||^2 that holds
// whenever ||d|| < gamma2 r or rho_hat <= beta on Hessian-Lipschitz functions.
double gradient_bound_c1(const CatConfig& cfg);

// Counts iterations violating that bound, with slack 1e-8 (1 + ||grad f(x)||).
int gradient_bound_violations(const Trace& trace, const CatConfig& cfg,
                              double lipschitz);

struct ConvergenceOrderReport {
  bool enough_data = false;
  // (e_k, e_{k+1} / e_k^2) over consecutive accepted iterates.
  std::vector<std::pair<double, double>> entries;
};

std::vector<std::pair<double, double>> convergence_order_ratios(
    const std::vector<double>& errors);

// Error-ratio sequence of the accepted iterates against a known minimizer.
// enough_data requires at least three error values.
ConvergenceOrderReport measure_convergence_order(const Trace& trace, const Vector& x_star);

// True when the last `tail` ratio entries all stay at or below `bound`.
// Divergent ratio sequences (linear convergence) fail this for any fixed bound.
bool tail_ratios_bounded(const ConvergenceOrderReport& report, int tail, double bound);

// CSV export with fixed column order
//   k,f,grad_norm,r,d_norm,delta,rho_hat,accepted,fevals,gevals,hevals
// and 17 significant digits for reals.
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace catopt
