#include "catopt/corpus.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "catopt/lds.hpp"
#include "catopt/matrix_completion.hpp"
#include "catopt/rng.hpp"

namespace catopt {

void ProblemSpec::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : params) {
    if (k == key) {
      v = value;
      return;
    }
  }
  params.emplace_back(key, value);
}

const std::string* ProblemSpec::find(const std::string& key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

long get_int(const ProblemSpec& spec, const std::string& key, long fallback) {
  const std::string* v = spec.find(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const long parsed = std::stol(*v, &pos);
    if (pos != v->size()) throw ParameterError("");
    return parsed;
  } catch (const std::exception&) {
    throw ParameterError("bad integer for '" + key + "': " + *v);
  }
}

double get_double(const ProblemSpec& spec, const std::string& key, double fallback) {
  const std::string* v = spec.find(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double parsed = std::stod(*v, &pos);
    if (pos != v->size()) throw ParameterError("");
    return parsed;
  } catch (const std::exception&) {
    throw ParameterError("bad number for '" + key + "': " + *v);
  }
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// Random rotated quadratic with the given eigenvalue range. The minimizer
// and optimal value are recorded from the construction.
ProblemInstance rotated_quadratic(const std::string& name, Index n, double eig_lo,
                                  double eig_hi, std::uint64_t seed) {
  Rng rng(seed);
  Matrix w(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) w(i, j) = rng.normal();
  const Matrix q = Eigen::HouseholderQR<Matrix>(w).householderQ();
  Vector eigs(n);
  for (Index i = 0; i < n; ++i) {
    const double t = (n == 1) ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    eigs[i] = eig_lo * std::pow(eig_hi / eig_lo, t);
  }
  Matrix h = q.transpose() * eigs.asDiagonal() * q;
  Vector g(n);
  for (Index i = 0; i < n; ++i) g[i] = rng.normal();
  Vector start(n);
  for (Index i = 0; i < n; ++i) start[i] = 2.0 * rng.normal();

  auto prob = std::make_shared<QuadraticProblem>(h, g, 0.0, name);
  const Vector x_star = Eigen::LLT<Matrix>(prob->h()).solve(-g);

  ProblemInstance inst;
  inst.label = name;
  inst.problem = prob;
  inst.start = start;
  inst.x_star = x_star;
  inst.f_star = prob->value(x_star);
  inst.hessian_lipschitz = 0.0;
  inst.lipschitz_box = std::numeric_limits<double>::infinity();
  inst.spec.name = name;
  return inst;
}

void require_keys(const ProblemSpec& spec, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : spec.params) {
    bool known = false;
    for (const char* candidate : allowed) {
      if (key == candidate) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParameterError("problem '" + spec.name + "' does not take parameter '" +
                           key + "'");
    }
  }
}

ProblemInstance fixed_indefinite(const std::string& name, const Vector& g) {
  Matrix h(2, 2);
  h << -1.0, 0.0, 0.0, 2.0;
  ProblemInstance inst;
  inst.label = name;
  inst.problem = std::make_shared<QuadraticProblem>(h, g, 0.0, name);
  inst.start = Vector::Zero(2);
  inst.hessian_lipschitz = 0.0;
  inst.lipschitz_box = std::numeric_limits<double>::infinity();
  inst.spec.name = name;
  return inst;
}

}  // namespace

ProblemInstance make_problem(const ProblemSpec& spec) {
  if (spec.name == "quad_well") {
    require_keys(spec, {});
    return rotated_quadratic("quad_well", 8, 1.0, 10.0, 101);
  }
  if (spec.name == "quad_ill") {
    require_keys(spec, {});
    return rotated_quadratic("quad_ill", 8, 1e-2, 1e2, 102);
  }
  if (spec.name == "quad_indef") {
    require_keys(spec, {});
    Vector g(2);
    g << 1.0, -1.0;
    return fixed_indefinite("quad_indef", g);
  }
  if (spec.name == "hard_case_quad") {
    // Gradient at the origin is orthogonal to the minimal eigenspace of the
    // indefinite Hessian, and the shifted-solution norm stays below the
    // acceptance window for any radius above 0.25, so the first subproblem
    // is a hard case at the default initial radius.
    require_keys(spec, {});
    Vector g(2);
    g << 0.0, -0.6;
    return fixed_indefinite("hard_case_quad", g);
  }
  if (spec.name == "rosenbrock2d") {
    require_keys(spec, {});
    ProblemInstance inst;
    inst.label = "rosenbrock2d";
    inst.problem = std::make_shared<Rosenbrock2d>();
    inst.start = Vector(2);
    inst.start << -1.2, 1.0;
    inst.x_star = Vector::Ones(2);
    inst.f_star = 0.0;
    inst.spec.name = "rosenbrock2d";
    return inst;
  }
  if (spec.name == "rosenbrock_chained") {
    require_keys(spec, {"n"});
    const Index n = get_int(spec, "n", 10);
    ProblemInstance inst;
    inst.problem = std::make_shared<ChainedRosenbrock>(n);
    inst.label = inst.problem->name();
    inst.start = Vector(n);
    for (Index i = 0; i < n; ++i) inst.start[i] = (i % 2 == 0) ? -1.2 : 1.0;
    inst.x_star = Vector::Ones(n);
    inst.f_star = 0.0;
    inst.spec.name = "rosenbrock_chained";
    inst.spec.set("n", std::to_string(n));
    return inst;
  }
  if (spec.name == "quartic_bowl") {
    require_keys(spec, {"n"});
    const Index n = get_int(spec, "n", 4);
    ProblemInstance inst;
    inst.problem = std::make_shared<QuarticBowl>(n);
    inst.label = "quartic_bowl";
    inst.start = Vector(n);
    for (Index i = 0; i < n; ++i) inst.start[i] = (i % 2 == 0) ? 1.0 : -1.0;
    inst.x_star = Vector::Zero(n);
    inst.f_star = 0.0;
    inst.lipschitz_box = 2.0;
    inst.hessian_lipschitz = QuarticBowl::hessian_lipschitz(inst.lipschitz_box);
    inst.spec.name = "quartic_bowl";
    inst.spec.set("n", std::to_string(n));
    return inst;
  }
  if (spec.name == "lds") {
    require_keys(spec, {"T", "d", "sigma", "seed"});
    const long t = get_int(spec, "T", 50);
    const long d = get_int(spec, "d", 4);
    const double sigma = get_double(spec, "sigma", 0.01);
    const auto seed = static_cast<std::uint64_t>(get_int(spec, "seed", 1));
    LdsInstance gen = generate_lds_instance(t, d, sigma, seed);
    ProblemInstance inst;
    inst.label = "lds_T" + std::to_string(t) + "_d" + std::to_string(d) + "_s" +
                 std::to_string(seed);
    inst.start = gen.problem->start_point();
    inst.problem = std::move(gen.problem);
    inst.spec.name = "lds";
    inst.spec.set("T", std::to_string(t));
    inst.spec.set("d", std::to_string(d));
    inst.spec.set("sigma", format_double(sigma));
    inst.spec.set("seed", std::to_string(seed));
    return inst;
  }
  if (spec.name == "mc") {
    require_keys(spec, {"n1", "n2", "rank", "fill", "lambda1", "lambda2", "seed"});
    const long n1 = get_int(spec, "n1", 48);
    const long n2 = get_int(spec, "n2", 30);
    const long rank = get_int(spec, "rank", 3);
    const double fill = get_double(spec, "fill", 0.5);
    const double lambda1 = get_double(spec, "lambda1", 0.1);
    const double lambda2 = get_double(spec, "lambda2", 0.1);
    const auto seed = static_cast<std::uint64_t>(get_int(spec, "seed", 1));
    McInstance gen = generate_mc_instance(n1, n2, rank, fill, lambda1, lambda2, seed);
    ProblemInstance inst;
    inst.label = "mc_" + std::to_string(n1) + "x" + std::to_string(n2) + "_r" +
                 std::to_string(rank) + "_s" + std::to_string(seed);
    inst.problem = std::move(gen.problem);
    inst.start = std::move(gen.start);
    inst.spec.name = "mc";
    inst.spec.set("n1", std::to_string(n1));
    inst.spec.set("n2", std::to_string(n2));
    inst.spec.set("rank", std::to_string(rank));
    inst.spec.set("fill", format_double(fill));
    inst.spec.set("lambda1", format_double(lambda1));
    inst.spec.set("lambda2", format_double(lambda2));
    inst.spec.set("seed", std::to_string(seed));
    return inst;
  }
  throw ParameterError("unknown problem name: " + spec.name);
}

std::vector<ProblemInstance> builtin_corpus() {
  std::vector<ProblemInstance> corpus;
  const char* fixed[] = {"quad_well", "quad_ill",      "quad_indef",
                         "hard_case_quad", "rosenbrock2d", "rosenbrock_chained",
                         "quartic_bowl"};
  for (const char* name : fixed) {
    ProblemSpec spec;
    spec.name = name;
    corpus.push_back(make_problem(spec));
  }
  {
    ProblemSpec spec;
    spec.name = "lds";
    spec.set("T", "5");
    spec.set("d", "2");
    spec.set("sigma", "0.1");
    spec.set("seed", "3");
    corpus.push_back(make_problem(spec));
  }
  {
    ProblemSpec spec;
    spec.name = "mc";
    spec.set("n1", "6");
    spec.set("n2", "5");
    spec.set("rank", "2");
    spec.set("fill", "0.6");
    spec.set("seed", "5");
    corpus.push_back(make_problem(spec));
  }
  return corpus;
}

void write_instance_spec(std::ostream& out, const ProblemInstance& inst) {
  out << "# catopt problem instance\n";
  out << "name " << inst.spec.name << "\n";
  out << "dimension " << inst.problem->dimension() << "\n";
  for (const auto& [k, v] : inst.spec.params) out << k << " " << v << "\n";
}

ProblemSpec read_instance_spec(std::istream& in) {
  ProblemSpec spec;
  std::optional<Index> dimension;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key, value;
    if (!(fields >> key)) continue;
    if (!(fields >> value)) throw ParameterError("instance spec: missing value for " + key);
    if (key == "name") {
      spec.name = value;
    } else if (key == "dimension") {
      dimension = std::stol(value);
    } else {
      spec.set(key, value);
    }
  }
  if (spec.name.empty()) throw ParameterError("instance spec: missing name");
  if (dimension) {
    const ProblemInstance rebuilt = make_problem(spec);
    if (rebuilt.problem->dimension() != *dimension) {
      throw ParameterError("instance spec: dimension mismatch for " + spec.name);
    }
  }
  return spec;
}

}  // namespace catopt
