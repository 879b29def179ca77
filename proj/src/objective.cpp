#include "catopt/objective.hpp"

namespace catopt {

QuadraticProblem::QuadraticProblem(Matrix h, Vector g, double c, std::string name)
    : h_(std::move(h)), g_(std::move(g)), c_(c), name_(std::move(name)) {
  if (h_.rows() != h_.cols() || h_.rows() != g_.size()) {
    throw ParameterError("QuadraticProblem: H must be n x n matching g");
  }
  if (!is_finite(h_) || !is_finite(g_) || !is_finite(c_)) {
    throw ParameterError("QuadraticProblem: non-finite data");
  }
  mirror_lower_triangle(h_);
}

double QuadraticProblem::value(const Vector& x) const {
  return 0.5 * x.dot(h_ * x) + g_.dot(x) + c_;
}

Vector QuadraticProblem::gradient(const Vector& x) const { return h_ * x + g_; }

Matrix QuadraticProblem::hessian(const Vector&) const { return h_; }

double Rosenbrock2d::value(const Vector& x) const {
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

Vector Rosenbrock2d::gradient(const Vector& x) const {
  Vector g(2);
  const double b = x[1] - x[0] * x[0];
  g[0] = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * b;
  g[1] = 200.0 * b;
  return g;
}

Matrix Rosenbrock2d::hessian(const Vector& x) const {
  Matrix h(2, 2);
  h(0, 0) = 2.0 - 400.0 * x[1] + 1200.0 * x[0] * x[0];
  h(1, 0) = -400.0 * x[0];
  h(1, 1) = 200.0;
  mirror_lower_triangle(h);
  return h;
}

ChainedRosenbrock::ChainedRosenbrock(Index n) : n_(n) {
  if (n < 2) throw ParameterError("ChainedRosenbrock: n must be >= 2");
  name_ = "rosenbrock" + std::to_string(n) + "d";
}

double ChainedRosenbrock::value(const Vector& x) const {
  double f = 0.0;
  for (Index i = 0; i + 1 < n_; ++i) {
    const double a = 1.0 - x[i];
    const double b = x[i + 1] - x[i] * x[i];
    f += a * a + 100.0 * b * b;
  }
  return f;
}

Vector ChainedRosenbrock::gradient(const Vector& x) const {
  Vector g = Vector::Zero(n_);
  for (Index i = 0; i + 1 < n_; ++i) {
    const double b = x[i + 1] - x[i] * x[i];
    g[i] += -2.0 * (1.0 - x[i]) - 400.0 * x[i] * b;
    g[i + 1] += 200.0 * b;
  }
  return g;
}

Matrix ChainedRosenbrock::hessian(const Vector& x) const {
  Matrix h = Matrix::Zero(n_, n_);
  for (Index i = 0; i + 1 < n_; ++i) {
    const double b = x[i + 1] - x[i] * x[i];
    h(i, i) += 2.0 - 400.0 * b + 800.0 * x[i] * x[i];
    h(i + 1, i) += -400.0 * x[i];
    h(i + 1, i + 1) += 200.0;
  }
  mirror_lower_triangle(h);
  return h;
}

QuarticBowl::QuarticBowl(Index n) : n_(n) {
  if (n < 1) throw ParameterError("QuarticBowl: n must be >= 1");
  name_ = "quartic_bowl";
}

double QuarticBowl::value(const Vector& x) const {
  double f = 0.0;
  for (Index i = 0; i < n_; ++i) {
    const double s = x[i] * x[i];
    f += 0.25 * s * s;
  }
  return f;
}

Vector QuarticBowl::gradient(const Vector& x) const {
  Vector g(n_);
  for (Index i = 0; i < n_; ++i) g[i] = x[i] * x[i] * x[i];
  return g;
}

Matrix QuarticBowl::hessian(const Vector& x) const {
  Matrix h = Matrix::Zero(n_, n_);
  for (Index i = 0; i < n_; ++i) h(i, i) = 3.0 * x[i] * x[i];
  return h;
}

}  // namespace catopt
