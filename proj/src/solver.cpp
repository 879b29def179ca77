#include "catopt/solver.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace catopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxConsecutiveNonfinite = 50;

std::string describe(const char* param, double value) {
  std::ostringstream out;
  out.precision(17);
  out << param << " = " << value;
  return out.str();
}

}  // namespace

void validate_config(const CatConfig& cfg) {
  if (!(cfg.r1 > 0.0) || !std::isfinite(cfg.r1)) {
    throw ConfigError("r1 must be positive: " + describe("r1", cfg.r1));
  }
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) {
    throw ConfigError("beta must lie in (0, 1): " + describe("beta", cfg.beta));
  }
  if (!(cfg.theta >= 0.0 && cfg.theta < 1.0)) {
    throw ConfigError("theta must lie in [0, 1): " + describe("theta", cfg.theta));
  }
  if (!(cfg.omega > 1.0) || !std::isfinite(cfg.omega)) {
    throw ConfigError("omega must exceed 1: " + describe("omega", cfg.omega));
  }
  if (!(cfg.gamma1 >= 0.0 && cfg.gamma1 < 1.0)) {
    throw ConfigError("gamma1 must lie in [0, 1): " + describe("gamma1", cfg.gamma1));
  }
  if (!(cfg.gamma2 > 1.0 / cfg.omega && cfg.gamma2 <= 1.0)) {
    throw ConfigError("gamma2 must lie in (1/omega, 1]: " + describe("gamma2", cfg.gamma2));
  }
  if (!(cfg.gamma3 > 0.0 && cfg.gamma3 <= 1.0)) {
    throw ConfigError("gamma3 must lie in (0, 1]: " + describe("gamma3", cfg.gamma3));
  }
  if (!(cfg.eps > 0.0)) {
    throw ConfigError("eps must be positive: " + describe("eps", cfg.eps));
  }
  if (cfg.max_iter < 1) {
    throw ConfigError("max_iter must be positive: " +
                      describe("max_iter", static_cast<double>(cfg.max_iter)));
  }
  const double compound =
      cfg.beta * cfg.theta / (cfg.gamma3 * (1.0 - cfg.beta)) + cfg.gamma1;
  if (!(compound < 1.0)) {
    throw ConfigError("beta*theta/(gamma3*(1-beta)) + gamma1 must be < 1: " +
                      describe("value", compound));
  }
}

double model_value(const Vector& g, const Matrix& h, const Vector& d) {
  return 0.5 * d.dot(h * d) + g.dot(d);
}

double rho_hat(double f_k, double f_trial, double m_val, double grad_trial_norm,
               double d_norm, double theta) {
  const double denom = -m_val + 0.5 * theta * grad_trial_norm * d_norm;
  if (denom == 0.0) return kInf;
  return (f_k - f_trial) / denom;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

trs::CertificateReport check_conditions(const Vector& g, const Matrix& h, const Vector& d,
                                        double delta, double r, double grad_trial_norm,
                                        const CatConfig& cfg) {
  return trs::check_conditions(g, h, d, delta, r, grad_trial_norm, cfg.gamma1,
                               cfg.gamma2, cfg.gamma3);
}

StepResult step(SolverState& state, const ObjectiveFunction& p, const CatConfig& cfg) {
  StepResult out;
  IterationRecord& rec = out.record;
  rec.k = state.k;
  rec.f = state.f_x;
  rec.grad_norm = state.g_x.norm();
  rec.r = state.r;

  if (!state.h_valid) {
    state.h_x = p.hessian(state.x);
    ++state.hevals;
    state.h_valid = true;
    if (!is_finite(state.h_x)) {
      out.has_record = false;
      out.stop = Status::numerical_failure;
      out.failure_reason = "non-finite Hessian at the incumbent";
      return out;
    }
  }

  trs::SubproblemInputs inputs{state.g_x, state.h_x, state.r, cfg.gamma2};
  const trs::SubproblemSolution sol = trs::solve_trs(inputs, state.delta_warm);
  state.delta_warm = sol.delta;

  rec.d_norm = sol.norm_d;
  rec.delta = sol.delta;
  rec.path = sol.path;

  out.x_trial = state.x + sol.d;
  const double f_trial = p.value(out.x_trial);
  ++state.fevals;
  const Vector g_trial = p.gradient(out.x_trial);
  ++state.gevals;
  rec.fevals = state.fevals;
  rec.gevals = state.gevals;
  rec.hevals = state.hevals;

  if (!is_finite(f_trial) || !is_finite(g_trial)) {
    // Rejected step: shrink from ||d|| and stay put. Repeated non-finite
    // trials eventually abort the run.
    rec.rho_hat = -kInf;
    rec.accepted = false;
    rec.grad_trial_norm = std::numeric_limits<double>::quiet_NaN();
    rec.certificates_ok = trs::solution_certified(
        check_conditions(state.g_x, state.h_x, sol.d, sol.delta, state.r, 0.0, cfg),
        rec.grad_norm, 0.0, cfg.gamma1);
    state.r = rec.d_norm / cfg.omega;
    if (!(state.r > 0.0) || !std::isfinite(state.r)) {
      out.stop = Status::numerical_failure;
      out.failure_reason = "trust-region radius collapsed";
      return out;
    }
    if (++state.consecutive_nonfinite >= kMaxConsecutiveNonfinite) {
      out.stop = Status::numerical_failure;
      out.failure_reason = "50 consecutive non-finite trial evaluations";
      return out;
    }
    ++state.k;
    return out;
  }
  state.consecutive_nonfinite = 0;

  const double grad_trial_norm = g_trial.norm();
  rec.grad_trial_norm = grad_trial_norm;
  rec.accepted = f_trial <= state.f_x;
  const double m_val = model_value(state.g_x, state.h_x, sol.d);
  rec.rho_hat = rho_hat(state.f_x, f_trial, m_val, grad_trial_norm, rec.d_norm, cfg.theta);
  rec.certificates_ok = trs::solution_certified(
      check_conditions(state.g_x, state.h_x, sol.d, sol.delta, state.r,
                       grad_trial_norm, cfg),
      rec.grad_norm, grad_trial_norm, cfg.gamma1);

  if (grad_trial_norm <= cfg.eps) {
    out.stop = Status::converged;
    return out;
  }

  if (rec.accepted) {
    state.x = out.x_trial;
    state.f_x = f_trial;
    state.g_x = g_trial;
    state.h_valid = false;
  }
  state.r = rec.rho_hat >= cfg.beta ? cfg.omega * rec.d_norm : rec.d_norm / cfg.omega;
  if (!(state.r > 0.0) || !std::isfinite(state.r)) {
    out.stop = Status::numerical_failure;
    out.failure_reason = "trust-region radius collapsed";
    return out;
  }
  ++state.k;
  return out;
}

SolveResult minimize(const ObjectiveFunction& p, const Vector& x1, const CatConfig& cfg) {
  validate_config(cfg);
  if (x1.size() != p.dimension() || !is_finite(x1)) {
    throw ParameterError("minimize: start point must be finite and match the dimension");
  }

  SolveResult result;
  SolverState state;
  state.x = x1;
  state.r = cfg.r1;
  state.f_x = p.value(x1);
  ++state.fevals;
  state.g_x = p.gradient(x1);
  ++state.gevals;
  result.trace.accepted_iterates.push_back(x1);

  if (!is_finite(state.f_x) || !is_finite(state.g_x)) {
    result.status = Status::numerical_failure;
    result.failure_reason = "non-finite objective at the start point";
    result.x_final = x1;
    return result;
  }

  while (state.k <= cfg.max_iter) {
    StepResult stepped;
    try {
      stepped = step(state, p, cfg);
    } catch (const SubproblemError& err) {
      result.status = Status::numerical_failure;
      result.failure_reason = err.what();
      result.x_final = state.x;
      result.iterations = static_cast<int>(result.trace.records.size());
      return result;
    }

    if (stepped.has_record) {
      result.trace.records.push_back(stepped.record);
      result.trace.max_trial_inf_norm = std::max(
          result.trace.max_trial_inf_norm, stepped.x_trial.cwiseAbs().maxCoeff());
      if (stepped.record.accepted) {
        result.trace.accepted_iterates.push_back(stepped.x_trial);
      }
    }

    if (stepped.stop == Status::converged) {
      if (!stepped.record.accepted) {
        result.trace.accepted_iterates.push_back(stepped.x_trial);
      }
      result.status = Status::converged;
      result.x_final = stepped.x_trial;
      result.iterations = static_cast<int>(result.trace.records.size());
      return result;
    }
    if (stepped.stop == Status::numerical_failure) {
      result.status = Status::numerical_failure;
      result.failure_reason = stepped.failure_reason;
      result.x_final = state.x;
      result.iterations = static_cast<int>(result.trace.records.size());
      return result;
    }
  }

  result.status = Status::iteration_limit;
  result.x_final = state.x;
  result.iterations = static_cast<int>(result.trace.records.size());
  return result;
}

TraceAudit audit_cat_trace(const Trace& trace, const CatConfig& cfg) {
  TraceAudit audit;
  const auto& recs = trace.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].certificates_ok) ++audit.certificate_violations;
    if (i + 1 == recs.size()) break;
    const double expected_r = recs[i].rho_hat >= cfg.beta
                                  ? cfg.omega * recs[i].d_norm
                                  : recs[i].d_norm / cfg.omega;
    if (recs[i + 1].r != expected_r) ++audit.radius_law_violations;
    if (recs[i].accepted) {
      if (!(recs[i + 1].f <= recs[i].f)) ++audit.descent_violations;
    } else {
      if (recs[i + 1].f != recs[i].f) ++audit.descent_violations;
    }
  }
  return audit;
}

double gradient_bound_c1(const CatConfig& cfg) {
  const double denom =
      cfg.gamma3 * (1.0 - cfg.gamma1) * (1.0 - cfg.beta) - cfg.beta * cfg.theta;
  return std::max((5.0 - 3.0 * cfg.beta) / (6.0 * denom),
                  1.0 / (2.0 * (1.0 - cfg.gamma1)));
}

int gradient_bound_violations(const Trace& trace, const CatConfig& cfg,
                              double lipschitz) {
  const double c1 = gradient_bound_c1(cfg);
  int violations = 0;
  for (const IterationRecord& rec : trace.records) {
    if (std::isnan(rec.grad_trial_norm)) continue;
    const bool premise = rec.d_norm < cfg.gamma2 * rec.r || rec.rho_hat <= cfg.beta;
    if (!premise) continue;
    const double bound =
        c1 * lipschitz * rec.d_norm * rec.d_norm + 1e-8 * (1.0 + rec.grad_norm);
    if (rec.grad_trial_norm > bound) ++violations;
  }
  return violations;
}

std::vector<std::pair<double, double>> convergence_order_ratios(
    const std::vector<double>& errors) {
  std::vector<std::pair<double, double>> entries;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double sq = errors[i] * errors[i];
    double ratio;
    if (sq == 0.0) {
      ratio = errors[i + 1] == 0.0 ? 0.0 : kInf;
    } else {
      ratio = errors[i + 1] / sq;
    }
    entries.emplace_back(errors[i], ratio);
  }
  return entries;
}

ConvergenceOrderReport measure_convergence_order(const Trace& trace, const Vector& x_star) {
  std::vector<double> errors;
  errors.reserve(trace.accepted_iterates.size());
  for (const Vector& x : trace.accepted_iterates) {
    errors.push_back((x - x_star).norm());
  }
  ConvergenceOrderReport report;
  report.enough_data = errors.size() >= 3;
  report.entries = convergence_order_ratios(errors);
  return report;
}

bool tail_ratios_bounded(const ConvergenceOrderReport& report, int tail, double bound) {
  if (!report.enough_data) return false;
  const std::size_t n = report.entries.size();
  const std::size_t from = n > static_cast<std::size_t>(tail) ? n - tail : 0;
  for (std::size_t i = from; i < n; ++i) {
    if (!(report.entries[i].second <= bound)) return false;
  }
  return true;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "k,f,grad_norm,r,d_norm,delta,rho_hat,accepted,fevals,gevals,hevals\n";
  out.precision(17);
  for (const IterationRecord& rec : trace.records) {
    out << rec.k << ',' << rec.f << ',' << rec.grad_norm << ',' << rec.r << ','
        << rec.d_norm << ',' << rec.delta << ',' << rec.rho_hat << ','
        << (rec.accepted ? 1 : 0) << ',' << rec.fevals << ',' << rec.gevals << ','
        << rec.hevals << '\n';
  }
}

}  // namespace catopt
