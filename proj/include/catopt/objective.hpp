#pragma once

#include <memory>
#include <string>
#include <utility>

#include "catopt/types.hpp"

namespace catopt {

// A twice-differentiable function R^n -> R with analytic derivatives.
//
// Implementations must be immutable after construction: value/gradient/
// hessian are pure functions of the point and safe to call concurrently.
// hessian() must return an exactly symmetric matrix (fill one triangle,
// then mirror_lower_triangle()).
class ObjectiveFunction {
 public:
  virtual ~ObjectiveFunction() = default;

  virtual Index dimension() const = 0;
  virtual const std::string& name() const = 0;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;
};

using ObjectivePtr = std::shared_ptr<const ObjectiveFunction>;

// f(x) = 1/2 x'Hx + g'x + c with H held exactly symmetric.
class QuadraticProblem final : public ObjectiveFunction {
 public:
  QuadraticProblem(Matrix h, Vector g, double c, std::string name = "quadratic");

  Index dimension() const override { return g_.size(); }
  const std::string& name() const override { return name_; }

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

  const Matrix& h() const { return h_; }
  const Vector& g() const { return g_; }
  double c() const { return c_; }

 private:
  Matrix h_;
  Vector g_;
  double c_;
  std::string name_;
};

// f(x, y) = (1 - x)^2 + 100 (y - x^2)^2, minimum f(1, 1) = 0.
class Rosenbrock2d final : public ObjectiveFunction {
 public:
  Rosenbrock2d() = default;

  Index dimension() const override { return 2; }
  const std::string& name() const override { return name_; }

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

 private:
  std::string name_ = "rosenbrock2d";
};

// Chained Rosenbrock: sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
class ChainedRosenbrock final : public ObjectiveFunction {
 public:
  explicit ChainedRosenbrock(Index n);

  Index dimension() const override { return n_; }
  const std::string& name() const override { return name_; }

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

 private:
  Index n_;
  std::string name_;
};

// Separable quartic f(x) = 1/4 sum_i x_i^4. Its Hessian 3 diag(x_i^2) is
// Lipschitz with constant 6R on the box |x_i| <= R, which makes this the
// fixture of choice for tests that need a known Hessian-Lipschitz bound.
class QuarticBowl final : public ObjectiveFunction {
 public:
  explicit QuarticBowl(Index n);

  Index dimension() const override { return n_; }
  const std::string& name() const override { return name_; }

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

  // Hessian-Lipschitz constant valid while |x_i| stays within `box`.
  static double hessian_lipschitz(double box) { return 6.0 * box; }

 private:
  Index n_;
  std::string name_;
};

}  // namespace catopt
