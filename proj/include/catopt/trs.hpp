#pragma once

#include <optional>

#include "catopt/types.hpp"

namespace catopt {
namespace trs {

// One trust-region subproblem: minimize 1/2 d'Hd + g'd over ||d|| <= r.
// gamma2 sets the acceptance window of the delta search: a shifted solution
// with ||d(delta)|| in [gamma2 r, r] terminates the search. Values close to 1
// force near-boundary solutions; smaller values stop the bisection earlier.
struct SubproblemInputs {
  Vector g;
  Matrix h;
  double r;
  double gamma2 = 0.8;
};

enum class SolvePath { newton, bisection, hard_case };

// Why the delta search handed over to the hard-case routine, when it did.
enum class FallbackReason { none, bracket_cap, bisection_cap };

struct SubproblemSolution {
  Vector d;
  double delta = 0.0;
  SolvePath path = SolvePath::newton;
  FallbackReason fallback = FallbackReason::none;
  double norm_d = 0.0;
  // ||grad M(d) + delta d|| = ||g + (H + delta I) d||, the stationarity
  // residual of the shifted system.
  double residual_stationarity = 0.0;
};

// Newton attempt: d = -H^{-1} g when a zero-shift Cholesky factorization
// succeeds and the step is inside the ball; absent otherwise. Factorization
// breakdown is how indefiniteness is detected, not an error.
std::optional<Vector> try_newton_step(const SubproblemInputs& in);

// Sign classification of the shifted solve d(delta) = -(H + delta I)^{-1} g:
//   -1  H + delta I not positive definite, or ||d(delta)|| > r
//   +1  positive definite and ||d(delta)|| < gamma2 r
//    0  positive definite and gamma2 r <= ||d(delta)|| <= r
// A singular shifted matrix fails the factorization and classifies as -1
// (the ||d|| -> infinity limit).
int phi(const SubproblemInputs& in, double delta);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  int phi_lo = 0;
  int phi_hi = 0;
};

inline constexpr int kMaxBracketSteps = 100;
inline constexpr int kMaxBisectionSteps = 200;

// Doubling/halving search for an interval with phi(lo) * phi(hi) <= 0,
// starting from the previous iteration's delta (0 on the first call, probed
// at delta' = 1). Empty result after kMaxBracketSteps probes means no
// bracket was found and the caller falls through to the hard case.
std::optional<Bracket> find_bracket(const SubproblemInputs& in, double delta_start);

// Bisection on the sign of phi; returns the first delta with phi(delta) = 0,
// or empty if kMaxBisectionSteps halvings never hit the acceptance window
// (a hard-case symptom).
std::optional<double> bisect(const SubproblemInputs& in, const Bracket& bracket);

// Boundary solution when the shifted system has no root: delta = -lambda_min,
// d = v + tau z with v the pseudoinverse solution (minimal eigenspace zeroed),
// z the first eigenvector of lambda_min (first nonzero entry made positive)
// and tau >= 0 chosen so that ||d|| = r.
//
// Throws SubproblemError if lambda_min >= 0 (the Newton path should have
// handled a convex model) or if the pseudoinverse solution already leaves
// the ball.
SubproblemSolution hard_case_solve(const SubproblemInputs& in);

// Full solver: Newton attempt, then bracket + bisection on phi, then the
// hard case. delta_warm seeds the bracket search.
SubproblemSolution solve_trs(const SubproblemInputs& in, double delta_warm = 0.0);

struct CertificateReport {
  bool c7a = false;  // stationarity: ||grad M(d) + delta d|| <= gamma1 ||grad f(x+d)|| + tol
  bool c7b = false;  // multiplier/norm compatibility: gamma2 delta r <= delta ||d|| + tol
  bool c7c = false;  // feasibility: ||d|| <= r (1 + 1e-12)
  bool c7d = false;  // model decrease: M(d) <= -gamma3 delta/2 ||d||^2 + tol
  double residual_stationarity = 0.0;
  double norm_d = 0.0;
  double model_value = 0.0;
  bool all() const { return c7a && c7b && c7c && c7d; }
};

// Checks the relaxed optimality certificates for a candidate (d, delta).
// grad_trial_norm is the measured ||grad f(x + d)||; the absolute slack is
// 1e-10 (1 + ||g||).
CertificateReport check_conditions(const Vector& g, const Matrix& h, const Vector& d,
                                   double delta, double r, double grad_trial_norm,
                                   double gamma1, double gamma2, double gamma3);

// Soundness predicate for solutions the solver actually emits. The norm,
// feasibility and model-decrease conditions come straight from the report;
// the stationarity residual is measured against the tolerance the solver
// can guarantee in double precision, 1e-8 (1 + ||g||): storing the step in
// binary64 already perturbs H d by roughly machine-epsilon ||H|| ||d||, so
// the report's tighter 1e-10 slack is out of reach on badly scaled
// Hessians no matter how the system is solved.
bool solution_certified(const CertificateReport& report, double g_norm,
                        double grad_trial_norm, double gamma1);

}  // namespace trs
}  // namespace catopt
