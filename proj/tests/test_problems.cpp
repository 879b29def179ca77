#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <limits>
#include <sstream>

#include "catopt/corpus.hpp"
#include "catopt/derivative_check.hpp"
#include "catopt/lds.hpp"
#include "catopt/matrix_completion.hpp"
#include "catopt/rng.hpp"

using namespace catopt;

namespace {

Vector perturbed(const Vector& x, Rng& rng, double scale) {
  Vector out = x;
  for (Index i = 0; i < out.size(); ++i) out[i] += scale * rng.normal();
  return out;
}

}  // namespace

TEST_CASE("quadratic problem evaluates its closed form") {
  Matrix h(2, 2);
  h << 2.0, 0.5, 0.5, 1.0;
  Vector g(2);
  g << 1.0, -1.0;
  QuadraticProblem p(h, g, 3.0);
  Vector x(2);
  x << 0.7, -0.3;
  const double expected = 0.5 * x.dot(h * x) + g.dot(x) + 3.0;
  CHECK(p.value(x) == doctest::Approx(expected).epsilon(1e-15));
  CHECK((p.gradient(x) - (h * x + g)).norm() == 0.0);
  CHECK(p.hessian(x) == p.hessian(2.0 * x));  // constant Hessian
}

TEST_CASE("corpus hessians are symmetric to the bit") {
  Rng rng(7);
  for (const ProblemInstance& inst : builtin_corpus()) {
    CAPTURE(inst.label);
    for (int trial = 0; trial < 3; ++trial) {
      const Vector x = trial == 0 ? inst.start : perturbed(inst.start, rng, 0.4);
      const Matrix h = inst.problem->hessian(x);
      for (Index i = 0; i < h.rows(); ++i) {
        for (Index j = 0; j < i; ++j) {
          REQUIRE(h(i, j) == h(j, i));
        }
      }
    }
  }
}

TEST_CASE("finite differences confirm every corpus problem") {
  Rng rng(11);
  for (const ProblemInstance& inst : builtin_corpus()) {
    CAPTURE(inst.label);
    const DerivativeReport at_start = check_derivatives(*inst.problem, inst.start, 1e-5);
    CHECK(at_start.grad_max_rel_err <= 1e-5);
    CHECK(at_start.hess_max_rel_err <= 1e-5);
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = perturbed(inst.start, rng, 0.5);
      const DerivativeReport rep = check_derivatives(*inst.problem, x, 1e-5);
      CHECK(rep.grad_max_rel_err <= 1e-5);
      CHECK(rep.hess_max_rel_err <= 1e-5);
    }
  }
}

TEST_CASE("finite differences confirm a small completion instance") {
  const McInstance inst = generate_mc_instance(4, 3, 2, 0.8, 0.1, 0.1, 21);
  Rng rng(9);
  const Vector x = perturbed(inst.start, rng, 0.5);
  const DerivativeReport rep = check_derivatives(*inst.problem, x, 1e-5);
  CHECK(rep.grad_max_rel_err <= 1e-5);
  CHECK(rep.hess_max_rel_err <= 1e-5);
}

TEST_CASE("finite differences are near-exact on quadratics") {
  ProblemSpec spec;
  spec.name = "quad_ill";
  const ProblemInstance inst = make_problem(spec);
  Rng rng(5);
  const Vector x = perturbed(inst.start, rng, 1.0);
  const DerivativeReport rep = check_derivatives(*inst.problem, x, 1e-5);
  CHECK(rep.grad_max_rel_err <= 1e-8);
}

TEST_CASE("derivative check flags non-finite evaluations") {
  struct Bad final : ObjectiveFunction {
    std::string name_ = "bad";
    Index dimension() const override { return 2; }
    const std::string& name() const override { return name_; }
    double value(const Vector& x) const override {
      return x[1] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : x.squaredNorm();
    }
    Vector gradient(const Vector& x) const override { return 2.0 * x; }
    Matrix hessian(const Vector&) const override { return 2.0 * Matrix::Identity(2, 2); }
  } bad;
  Vector x(2);
  x << 0.0, 0.5;  // probing coordinate 1 upward crosses into the NaN region
  CHECK_THROWS_WITH_AS(check_derivatives(bad, x, 1e-2),
                       doctest::Contains("coordinate 1"), EvaluationError);
  CHECK_THROWS_AS(check_derivatives(bad, x, -1.0), ParameterError);
}

TEST_CASE("corpus contents match the advertised fixtures") {
  const auto corpus = builtin_corpus();
  const auto find = [&](const std::string& label) -> const ProblemInstance& {
    for (const ProblemInstance& inst : corpus) {
      if (inst.label == label) return inst;
    }
    REQUIRE_MESSAGE(false, "missing corpus entry: " << label);
    return corpus.front();
  };

  const ProblemInstance& rosen = find("rosenbrock2d");
  Vector ones = Vector::Ones(2);
  CHECK(rosen.problem->value(ones) == 0.0);
  CHECK(rosen.problem->gradient(ones).norm() == 0.0);
  CHECK(rosen.start[0] == -1.2);

  const ProblemInstance& indef = find("quad_indef");
  const Matrix h = indef.problem->hessian(indef.start);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  CHECK(eig.eigenvalues()[0] == doctest::Approx(-1.0));
  CHECK(eig.eigenvalues()[1] == doctest::Approx(2.0));

  // Hard-case fixture: gradient at the start orthogonal to the minimal
  // eigenspace of the indefinite Hessian.
  const ProblemInstance& hard = find("hard_case_quad");
  const Vector g0 = hard.problem->gradient(hard.start);
  CHECK(std::abs(g0.dot(Vector::Unit(2, 0))) == 0.0);
  CHECK(g0.norm() > 0.0);

  find("quad_well");
  find("quad_ill");
  find("rosenbrock10d");
  CHECK(find("quartic_bowl").hessian_lipschitz.has_value());
  CHECK(find("lds_T5_d2_s3").problem->dimension() == 2 * 4 + 6 * 2);
  find("mc_6x5_r2_s5");
}

TEST_CASE("lds generator dimensions and determinism") {
  CHECK(generate_lds_instance(50, 4, 0.01, 7).problem->dimension() == 236);
  CHECK(generate_lds_instance(2, 1, 1.0, 0).problem->dimension() == 5);

  const LdsInstance a = generate_lds_instance(6, 3, 0.05, 123);
  const LdsInstance b = generate_lds_instance(6, 3, 0.05, 123);
  const Vector zero = Vector::Zero(a.problem->dimension());
  CHECK(a.problem->value(zero) == b.problem->value(zero));
  CHECK(a.problem->start_point() == b.problem->start_point());

  const LdsInstance c = generate_lds_instance(6, 3, 0.05, 124);
  CHECK(a.problem->value(zero) != c.problem->value(zero));

  CHECK_THROWS_AS(generate_lds_instance(1, 3, 0.05, 1), ParameterError);
  CHECK_THROWS_AS(generate_lds_instance(6, 0, 0.05, 1), ParameterError);
  CHECK_THROWS_AS(generate_lds_instance(6, 3, 0.0, 1), ParameterError);
}

TEST_CASE("lds objective at the ground truth recovers the simulated noise") {
  const LdsInstance inst = generate_lds_instance(20, 3, 0.05, 9);
  const Vector truth = inst.problem->pack(inst.a_true, inst.b_true, inst.h_true);
  double expected = 0.0;
  const double w = 1.0 / (0.05 * 0.05);
  for (Index t = 0; t < 20; ++t) {
    expected += w * inst.process_noise[t].squaredNorm() + inst.obs_noise[t].squaredNorm();
  }
  CHECK(inst.problem->value(truth) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mc generator omega sampling and fallbacks") {
  const McInstance full = generate_mc_instance(6, 5, 2, 1.0, 0.1, 0.1, 2);
  CHECK(full.problem->omega().size() == 30);

  const McInstance sparse = generate_mc_instance(6, 5, 2, 1e-12, 0.1, 0.1, 2);
  CHECK(sparse.problem->omega().size() >= 5);  // diagonal fallback

  const McInstance a = generate_mc_instance(8, 7, 3, 0.5, 0.1, 0.2, 42);
  const McInstance b = generate_mc_instance(8, 7, 3, 0.5, 0.1, 0.2, 42);
  CHECK(a.start == b.start);
  CHECK(a.problem->value(a.start) == b.problem->value(b.start));
  CHECK(a.problem->dimension() == 8 + 7 + 15 * 3);
  CHECK(a.problem->mu() == b.problem->mu());

  CHECK_THROWS_AS(generate_mc_instance(6, 5, 5, 0.5, 0.1, 0.1, 1), ParameterError);
  CHECK_THROWS_AS(generate_mc_instance(6, 5, 0, 0.5, 0.1, 0.1, 1), ParameterError);
  CHECK_THROWS_AS(generate_mc_instance(6, 5, 2, 0.0, 0.1, 0.1, 1), ParameterError);
  CHECK_THROWS_AS(generate_mc_instance(6, 5, 2, 1.5, 0.1, 0.1, 1), ParameterError);
}

TEST_CASE("mc objective matches a direct evaluation of its formula") {
  const McInstance inst = generate_mc_instance(5, 4, 2, 0.8, 0.3, 0.2, 17);
  const MatrixCompletionProblem& p = *inst.problem;
  Rng rng(3);
  Vector z = perturbed(inst.start, rng, 0.7);

  const Index n1 = 5, n2 = 4, r = 2;
  double expected = 0.0;
  for (const auto& [i, j] : p.omega()) {
    Vector pi = z.segment(n1 + n2 + i * r, r);
    Vector qj = z.segment(n1 + n2 + n1 * r + j * r, r);
    const double resid = inst.d_true(i, j) - p.mu() - z[i] - z[n1 + j] - pi.dot(qj);
    expected += resid * resid + 0.3 * (z[i] * z[i] + z[n1 + j] * z[n1 + j]) +
                0.2 * (pi.squaredNorm() + qj.squaredNorm());
  }
  CHECK(p.value(z) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("instance specs round-trip through the text format") {
  for (const char* name : {"lds_T5_d2_s3", "mc_6x5_r2_s5", "quad_well", "rosenbrock10d"}) {
    ProblemInstance original;
    for (ProblemInstance& inst : builtin_corpus()) {
      if (inst.label == name) original = std::move(inst);
    }
    REQUIRE(original.problem != nullptr);

    std::stringstream stream;
    write_instance_spec(stream, original);
    const ProblemSpec parsed = read_instance_spec(stream);
    const ProblemInstance rebuilt = make_problem(parsed);

    CHECK(rebuilt.problem->dimension() == original.problem->dimension());
    CHECK(rebuilt.start == original.start);
    CHECK(rebuilt.problem->value(original.start) == original.problem->value(original.start));
  }

  std::stringstream bad("dimension 4\n");
  CHECK_THROWS_AS(read_instance_spec(bad), ParameterError);

  std::stringstream mismatched("name rosenbrock2d\ndimension 5\n");
  CHECK_THROWS_AS(read_instance_spec(mismatched), ParameterError);
}

TEST_CASE("unknown registry names and parameters are rejected") {
  ProblemSpec unknown;
  unknown.name = "no_such_problem";
  CHECK_THROWS_AS(make_problem(unknown), ParameterError);

  ProblemSpec bad_param;
  bad_param.name = "lds";
  bad_param.set("T", "not_a_number");
  CHECK_THROWS_AS(make_problem(bad_param), ParameterError);

  ProblemSpec stray_param;
  stray_param.name = "rosenbrock2d";
  stray_param.set("seed", "3");
  CHECK_THROWS_AS(make_problem(stray_param), ParameterError);
}
