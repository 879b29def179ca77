#include "catopt/classic.hpp"

#include <cmath>
#include <limits>

namespace catopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxConsecutiveNonfinite = 50;
// Same subproblem window as the adaptive defaults, so both drivers share
// solve_trs behavior exactly.
constexpr double kSubproblemGamma2 = 0.8;

}  // namespace

void validate_config(const ClassicConfig& cfg) {
  if (!(cfg.r1 > 0.0) || !std::isfinite(cfg.r1)) {
    throw ConfigError("classic: r1 must be positive");
  }
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) {
    throw ConfigError("classic: beta must lie in (0, 1)");
  }
  if (!(cfg.omega > 1.0) || !std::isfinite(cfg.omega)) {
    throw ConfigError("classic: omega must exceed 1");
  }
  if (!(cfg.accept_eta >= 0.0 && cfg.accept_eta <= cfg.beta)) {
    throw ConfigError("classic: accept_eta must lie in [0, beta]");
  }
  if (!(cfg.eps > 0.0)) throw ConfigError("classic: eps must be positive");
  if (cfg.max_iter < 1) throw ConfigError("classic: max_iter must be positive");
}

SolveResult classic_minimize(const ObjectiveFunction& p, const Vector& x1,
                             const ClassicConfig& cfg) {
  validate_config(cfg);
  if (x1.size() != p.dimension() || !is_finite(x1)) {
    throw ParameterError("classic_minimize: start point must be finite and match the dimension");
  }
  // Certificates audited with the same relaxation constants as the adaptive
  // defaults.
  CatConfig cert;
  cert.gamma2 = kSubproblemGamma2;

  SolveResult result;
  result.trace.accepted_iterates.push_back(x1);

  Vector x = x1;
  double r = cfg.r1;
  double delta_warm = 0.0;
  double f_x = p.value(x);
  Vector g_x = p.gradient(x);
  Matrix h_x;
  bool h_valid = false;
  long fevals = 1, gevals = 1, hevals = 0;
  int consecutive_nonfinite = 0;

  if (!is_finite(f_x) || !is_finite(g_x)) {
    result.status = Status::numerical_failure;
    result.failure_reason = "non-finite objective at the start point";
    result.x_final = x1;
    return result;
  }

  auto finish = [&](Status status, const Vector& x_final, const std::string& reason) {
    result.status = status;
    result.failure_reason = reason;
    result.x_final = x_final;
    result.iterations = static_cast<int>(result.trace.records.size());
    return result;
  };

  for (int k = 1; k <= cfg.max_iter; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.f = f_x;
    rec.grad_norm = g_x.norm();
    rec.r = r;

    if (!h_valid) {
      h_x = p.hessian(x);
      ++hevals;
      h_valid = true;
      if (!is_finite(h_x)) {
        return finish(Status::numerical_failure, x, "non-finite Hessian at the incumbent");
      }
    }

    trs::SubproblemInputs inputs{g_x, h_x, r, kSubproblemGamma2};
    trs::SubproblemSolution sol;
    try {
      sol = trs::solve_trs(inputs, delta_warm);
    } catch (const SubproblemError& err) {
      return finish(Status::numerical_failure, x, err.what());
    }
    delta_warm = sol.delta;
    rec.d_norm = sol.norm_d;
    rec.delta = sol.delta;
    rec.path = sol.path;

    const Vector x_trial = x + sol.d;
    const double f_trial = p.value(x_trial);
    ++fevals;
    const Vector g_trial = p.gradient(x_trial);
    ++gevals;
    rec.fevals = fevals;
    rec.gevals = gevals;
    rec.hevals = hevals;
    result.trace.max_trial_inf_norm =
        std::max(result.trace.max_trial_inf_norm, x_trial.cwiseAbs().maxCoeff());

    if (!is_finite(f_trial) || !is_finite(g_trial)) {
      rec.rho_hat = -kInf;
      rec.accepted = false;
      rec.grad_trial_norm = std::numeric_limits<double>::quiet_NaN();
      rec.certificates_ok = trs::solution_certified(
          check_conditions(g_x, h_x, sol.d, sol.delta, r, 0.0, cert),
          rec.grad_norm, 0.0, cert.gamma1);
      result.trace.records.push_back(rec);
      r = r / cfg.omega;
      if (!(r > 0.0) || !std::isfinite(r)) {
        return finish(Status::numerical_failure, x, "trust-region radius collapsed");
      }
      if (++consecutive_nonfinite >= kMaxConsecutiveNonfinite) {
        return finish(Status::numerical_failure, x,
                      "50 consecutive non-finite trial evaluations");
      }
      continue;
    }
    consecutive_nonfinite = 0;

    const double grad_trial_norm = g_trial.norm();
    rec.grad_trial_norm = grad_trial_norm;
    const double m_val = model_value(g_x, h_x, sol.d);
    // theta = 0 reduces rho_hat to the conventional ratio.
    rec.rho_hat = rho_hat(f_x, f_trial, m_val, grad_trial_norm, rec.d_norm, 0.0);
    rec.accepted = rec.rho_hat >= cfg.accept_eta;
    rec.certificates_ok = trs::solution_certified(
        check_conditions(g_x, h_x, sol.d, sol.delta, r, grad_trial_norm, cert),
        rec.grad_norm, grad_trial_norm, cert.gamma1);
    result.trace.records.push_back(rec);

    if (rec.accepted) {
      result.trace.accepted_iterates.push_back(x_trial);
    }
    if (grad_trial_norm <= cfg.eps) {
      if (!rec.accepted) result.trace.accepted_iterates.push_back(x_trial);
      return finish(Status::converged, x_trial, "");
    }
    if (rec.accepted) {
      x = x_trial;
      f_x = f_trial;
      g_x = g_trial;
      h_valid = false;
    }
    r = rec.rho_hat >= cfg.beta ? cfg.omega * r : r / cfg.omega;
    if (!(r > 0.0) || !std::isfinite(r)) {
      return finish(Status::numerical_failure, x, "trust-region radius collapsed");
    }
  }
  return finish(Status::iteration_limit, x, "");
}

SolveResult cat_theta_ablation(const ObjectiveFunction& p, const Vector& x1,
                               CatConfig cfg) {
  cfg.theta = 0.0;
  return minimize(p, x1, cfg);
}

TraceAudit audit_classic_trace(const Trace& trace, const ClassicConfig& cfg) {
  TraceAudit audit;
  const auto& recs = trace.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].certificates_ok) ++audit.certificate_violations;
    if (i + 1 == recs.size()) break;
    const double expected_r =
        recs[i].rho_hat >= cfg.beta ? cfg.omega * recs[i].r : recs[i].r / cfg.omega;
    if (recs[i + 1].r != expected_r) ++audit.radius_law_violations;
    if (recs[i].accepted) {
      if (!(recs[i + 1].f <= recs[i].f)) ++audit.descent_violations;
    } else {
      if (recs[i + 1].f != recs[i].f) ++audit.descent_violations;
    }
  }
  return audit;
}

}  // namespace catopt
