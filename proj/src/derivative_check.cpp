#include "catopt/derivative_check.hpp"

#include <string>

namespace catopt {

namespace {

double checked_value(const ObjectiveFunction& p, const Vector& x, Index coord) {
  const double v = p.value(x);
  if (!is_finite(v)) {
    throw EvaluationError(p.name() + ": non-finite value probing coordinate " +
                          std::to_string(coord));
  }
  return v;
}

Vector checked_gradient(const ObjectiveFunction& p, const Vector& x, Index coord) {
  Vector g = p.gradient(x);
  if (!is_finite(g)) {
    throw EvaluationError(p.name() + ": non-finite gradient probing coordinate " +
                          std::to_string(coord));
  }
  return g;
}

}  // namespace

DerivativeReport check_derivatives(const ObjectiveFunction& p, const Vector& x,
                                   double h) {
  if (!(h > 0.0)) throw ParameterError("check_derivatives: step must be positive");
  if (x.size() != p.dimension() || !is_finite(x)) {
    throw ParameterError("check_derivatives: bad evaluation point");
  }
  const Index n = p.dimension();

  const Vector grad = checked_gradient(p, x, -1);
  const Matrix hess = p.hessian(x);
  if (!is_finite(hess)) throw EvaluationError(p.name() + ": non-finite Hessian");

  Vector probe = x;
  double grad_err = 0.0;
  double hess_err = 0.0;
  for (Index i = 0; i < n; ++i) {
    probe[i] = x[i] + h;
    const double f_plus = checked_value(p, probe, i);
    const Vector g_plus = checked_gradient(p, probe, i);
    probe[i] = x[i] - h;
    const double f_minus = checked_value(p, probe, i);
    const Vector g_minus = checked_gradient(p, probe, i);
    probe[i] = x[i];

    grad_err = std::max(grad_err, std::abs((f_plus - f_minus) / (2.0 * h) - grad[i]));
    const Vector col_fd = (g_plus - g_minus) / (2.0 * h);
    hess_err = std::max(hess_err, (col_fd - hess.col(i)).cwiseAbs().maxCoeff());
  }

  DerivativeReport report;
  report.grad_max_rel_err = grad_err / (1.0 + grad.cwiseAbs().maxCoeff());
  report.hess_max_rel_err = hess_err / (1.0 + hess.cwiseAbs().maxCoeff());
  return report;
}

}  // namespace catopt
