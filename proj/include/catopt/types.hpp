#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace catopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Invalid arguments to generators, solvers or statistics.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A solver hyperparameter outside its admissible range.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Objective returned NaN/Inf where a finite value was required.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The subproblem solver exhausted all fallbacks.
struct SubproblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_finite(double v) { return std::isfinite(v); }

inline bool is_finite(const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

inline bool is_finite(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) return false;
    }
  }
  return true;
}

// Copies the lower triangle onto the upper one so that A(i,j) == A(j,i)
// holds bit-for-bit. All Hessians in this library go through here.
inline void mirror_lower_triangle(Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = j + 1; i < a.rows(); ++i) {
      a(j, i) = a(i, j);
    }
  }
}

}  // namespace catopt
