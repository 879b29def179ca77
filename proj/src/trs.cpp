#include "catopt/trs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace catopt {
namespace trs {

namespace {

void validate_inputs(const SubproblemInputs& in) {
  if (in.g.size() != in.h.rows() || in.h.rows() != in.h.cols()) {
    throw SubproblemError("subproblem: dimension mismatch");
  }
  if (!(in.r > 0.0)) throw SubproblemError("subproblem: radius must be positive");
  if (!is_finite(in.g) || !is_finite(in.h) || !is_finite(in.r)) {
    throw SubproblemError("subproblem: non-finite inputs");
  }
}

// Shifted solve (H + delta I) d = -g via Cholesky with one step of iterative
// refinement. pd is false whenever the factorization breaks down, which
// covers indefinite and singular shifts alike.
struct ShiftedSolve {
  bool pd = false;
  Vector d;
};

ShiftedSolve solve_shifted(const Matrix& h, const Vector& g, double delta) {
  Matrix shifted = h;
  shifted.diagonal().array() += delta;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) return {};
  Vector d = llt.solve(-g);
  if (!is_finite(d)) return {};
  // Iterative refinement; ill-conditioned shifts near -lambda_min otherwise
  // leave stationarity residuals far above the certificate tolerances.
  double best_residual = std::numeric_limits<double>::infinity();
  Vector best = d;
  for (int pass = 0; pass < 3; ++pass) {
    const Vector residual = -g - shifted * d;
    const double norm = residual.norm();
    if (!std::isfinite(norm)) break;
    if (norm < best_residual) {
      best_residual = norm;
      best = d;
    }
    if (norm <= 1e-14 * (1.0 + g.norm())) break;
    d += llt.solve(residual);
    if (!is_finite(d)) break;
  }
  if (!is_finite(best)) return {};
  return {true, std::move(best)};
}

int classify(const SubproblemInputs& in, const ShiftedSolve& solve) {
  if (!solve.pd) return -1;
  const double nd = solve.d.norm();
  if (nd > in.r) return -1;
  if (nd < in.gamma2 * in.r) return +1;
  return 0;
}

SubproblemSolution finish(const SubproblemInputs& in, Vector d, double delta,
                          SolvePath path, FallbackReason fallback) {
  SubproblemSolution sol;
  sol.norm_d = d.norm();
  sol.residual_stationarity = (in.g + in.h * d + delta * d).norm();
  if (!is_finite(d) || !std::isfinite(sol.norm_d) ||
      !std::isfinite(sol.residual_stationarity)) {
    throw SubproblemError("subproblem solution left the representable range");
  }
  sol.d = std::move(d);
  sol.delta = delta;
  sol.path = path;
  sol.fallback = fallback;
  return sol;
}

}  // namespace

std::optional<Vector> try_newton_step(const SubproblemInputs& in) {
  validate_inputs(in);
  ShiftedSolve solve = solve_shifted(in.h, in.g, 0.0);
  if (!solve.pd) return std::nullopt;
  if (solve.d.norm() > in.r) return std::nullopt;
  return std::move(solve.d);
}

int phi(const SubproblemInputs& in, double delta) {
  validate_inputs(in);
  return classify(in, solve_shifted(in.h, in.g, delta));
}

std::optional<Bracket> find_bracket(const SubproblemInputs& in, double delta_start) {
  validate_inputs(in);
  if (delta_start < 0.0 || !std::isfinite(delta_start)) {
    throw SubproblemError("find_bracket: bad starting delta");
  }
  const int phi_start = phi(in, delta_start);
  if (phi_start == 0) return Bracket{delta_start, delta_start, 0, 0};

  double probe = delta_start == 0.0 ? 1.0 : 2.0 * delta_start;
  for (int step = 0; step < kMaxBracketSteps; ++step) {
    const int phi_probe = phi(in, probe);
    if (phi_start * phi_probe <= 0) {
      Bracket bracket;
      bracket.lo = std::min(delta_start, probe);
      bracket.hi = std::max(delta_start, probe);
      bracket.phi_lo = delta_start <= probe ? phi_start : phi_probe;
      bracket.phi_hi = delta_start <= probe ? phi_probe : phi_start;
      return bracket;
    }
    probe = phi_probe < 0 ? 2.0 * probe : 0.5 * probe;
    if (!std::isfinite(probe) || probe == 0.0) break;
  }
  return std::nullopt;
}

std::optional<double> bisect(const SubproblemInputs& in, const Bracket& bracket) {
  validate_inputs(in);
  if (bracket.phi_lo * bracket.phi_hi > 0) {
    throw SubproblemError("bisect: endpoints do not straddle a root");
  }
  if (bracket.phi_lo == 0) return bracket.lo;
  if (bracket.phi_hi == 0) return bracket.hi;

  double lo = bracket.lo;
  double hi = bracket.hi;
  int phi_lo = bracket.phi_lo;
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const int phi_mid = phi(in, mid);
    if (phi_mid == 0) return mid;
    if (phi_mid == phi_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::nullopt;
}

SubproblemSolution hard_case_solve(const SubproblemInputs& in) {
  validate_inputs(in);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(in.h);
  if (eig.info() != Eigen::Success) {
    throw SubproblemError("hard_case_solve: eigendecomposition failed");
  }
  const Vector& lambda = eig.eigenvalues();
  const Matrix& q = eig.eigenvectors();
  const double lambda_min = lambda[0];
  if (lambda_min >= 0.0) {
    throw SubproblemError(
        "hard_case_solve: model is convex; the Newton or bisection path should "
        "have produced a solution");
  }
  const double delta = -lambda_min;

  // Pseudoinverse solution with the minimal eigenspace zeroed out.
  const Index n = in.g.size();
  const double eig_tol = 1e-12 * (1.0 + std::abs(lambda_min));
  Vector v = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double shifted = lambda[i] + delta;
    if (shifted <= eig_tol) continue;  // minimal eigenspace
    v += (-(q.col(i).dot(in.g)) / shifted) * q.col(i);
  }
  const double v_norm = v.norm();
  if (v_norm > in.r * (1.0 + 1e-10)) {
    throw SubproblemError(
        "hard_case_solve: pseudoinverse solution leaves the ball; the shift "
        "search failed on a non-hard instance");
  }

  Vector z = q.col(0);
  for (Index i = 0; i < n; ++i) {
    if (z[i] != 0.0) {
      if (z[i] < 0.0) z = -z;
      break;
    }
  }
  const double tau = std::sqrt(std::max(0.0, in.r * in.r - v_norm * v_norm));
  return finish(in, v + tau * z, delta, SolvePath::hard_case, FallbackReason::none);
}

SubproblemSolution solve_trs(const SubproblemInputs& in, double delta_warm) {
  validate_inputs(in);
  if (auto newton = try_newton_step(in)) {
    return finish(in, std::move(*newton), 0.0, SolvePath::newton, FallbackReason::none);
  }
  if (auto bracket = find_bracket(in, delta_warm)) {
    if (auto delta = bisect(in, *bracket)) {
      ShiftedSolve solve = solve_shifted(in.h, in.g, *delta);
      if (!solve.pd) throw SubproblemError("solve_trs: accepted shift lost definiteness");
      return finish(in, std::move(solve.d), *delta, SolvePath::bisection,
                    FallbackReason::none);
    }
    SubproblemSolution sol = hard_case_solve(in);
    sol.fallback = FallbackReason::bisection_cap;
    return sol;
  }
  SubproblemSolution sol = hard_case_solve(in);
  sol.fallback = FallbackReason::bracket_cap;
  return sol;
}

CertificateReport check_conditions(const Vector& g, const Matrix& h, const Vector& d,
                                   double delta, double r, double grad_trial_norm,
                                   double gamma1, double gamma2, double gamma3) {
  CertificateReport report;
  const double tol = 1e-10 * (1.0 + g.norm());
  report.norm_d = d.norm();
  report.residual_stationarity = (g + h * d + delta * d).norm();
  report.model_value = 0.5 * d.dot(h * d) + g.dot(d);
  report.c7a = report.residual_stationarity <= gamma1 * grad_trial_norm + tol;
  report.c7b = gamma2 * delta * r <= delta * report.norm_d + tol;
  report.c7c = report.norm_d <= r * (1.0 + 1e-12);
  report.c7d = report.model_value <= -gamma3 * 0.5 * delta * report.norm_d * report.norm_d + tol;
  return report;
}

bool solution_certified(const CertificateReport& report, double g_norm,
                        double grad_trial_norm, double gamma1) {
  const bool stationarity =
      report.residual_stationarity <=
      gamma1 * grad_trial_norm + 1e-8 * (1.0 + g_norm);
  return stationarity && report.c7b && report.c7c && report.c7d;
}

}  // namespace trs
}  // namespace catopt
