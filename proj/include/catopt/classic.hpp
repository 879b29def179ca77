#pragma once

#include "catopt/solver.hpp"

namespace catopt {

// Baseline trust-region configuration: the conventional ratio
// rho = (f(x) - f(x+d)) / (-M(d)), acceptance at rho >= accept_eta, and the
// radius updated from r_k itself (omega r_k on success, r_k / omega
// otherwise). Everything else, including the subproblem solver and the
// trial-gradient termination rule, matches the adaptive method so that trace
// differences isolate the ratio and radius policies.
struct ClassicConfig {
  double r1 = 1.0;
  double beta = 0.1;
  double omega = 8.0;
  double accept_eta = 0.0;  // accept any decrease by default
  double eps = 1e-5;
  int max_iter = 10000;
};

void validate_config(const ClassicConfig& cfg);  // throws ConfigError

SolveResult classic_minimize(const ObjectiveFunction& p, const Vector& x1,
                             const ClassicConfig& cfg);

// The theta = 0 ablation of the adaptive method: identical to minimize()
// with the trial-gradient term removed from the ratio.
SolveResult cat_theta_ablation(const ObjectiveFunction& p, const Vector& x1,
                               CatConfig cfg);

// Classic radius-law audit: r_{k+1} is exactly omega r_k or r_k / omega.
TraceAudit audit_classic_trace(const Trace& trace, const ClassicConfig& cfg);

}  // namespace catopt
