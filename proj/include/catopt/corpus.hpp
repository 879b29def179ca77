#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catopt/objective.hpp"

namespace catopt {

// Regenerable description of a problem instance: a registry name plus
// ordered key/value generator parameters.
struct ProblemSpec {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;

  void set(const std::string& key, const std::string& value);
  const std::string* find(const std::string& key) const;
};

// A concrete problem ready to minimize, together with whatever side
// information the registry knows about it.
struct ProblemInstance {
  std::string label;
  ObjectivePtr problem;
  Vector start;
  std::optional<double> f_star;
  std::optional<Vector> x_star;
  // Hessian-Lipschitz bound, valid while |x_i| <= lipschitz_box for all i.
  std::optional<double> hessian_lipschitz;
  double lipschitz_box = 0.0;
  ProblemSpec spec;
};

// Builds an instance from its spec. Known names:
//   quad_well, quad_ill, quad_indef, hard_case_quad, rosenbrock2d,
//   rosenbrock_chained (n), quartic_bowl (n),
//   lds (T, d, sigma, seed), mc (n1, n2, rank, fill, lambda1, lambda2, seed)
// Unknown names or parameters raise ParameterError.
ProblemInstance make_problem(const ProblemSpec& spec);

// The built-in problem corpus with canonical start points. Stands in for an
// external benchmark set: convex quadratics (well- and ill-conditioned), an
// indefinite quadratic, a hard-case fixture, 2-d and chained Rosenbrock, the
// quartic with a registered Hessian-Lipschitz bound, and small generated
// LDS / matrix-completion instances.
std::vector<ProblemInstance> builtin_corpus();

// Plain-text instance header (name, dimension, generator parameters).
// Sufficient to regenerate the instance through make_problem.
void write_instance_spec(std::ostream& out, const ProblemInstance& inst);
ProblemSpec read_instance_spec(std::istream& in);

}  // namespace catopt
