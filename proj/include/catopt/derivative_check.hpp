#pragma once

#include "catopt/objective.hpp"

namespace catopt {

struct DerivativeReport {
  double grad_max_rel_err;
  double hess_max_rel_err;
};

// Central finite differences of f against the analytic gradient, and of the
// analytic gradient against the analytic Hessian. Errors are max-norm
// differences scaled by (1 + max-norm of the analytic quantity).
//
// Finite differences are a verification oracle only; no production code
// path evaluates derivatives this way.
//
// Throws EvaluationError naming the offending coordinate if any probed
// evaluation is non-finite.
DerivativeReport check_derivatives(const ObjectiveFunction& p, const Vector& x,
                                   double h);

}  // namespace catopt
