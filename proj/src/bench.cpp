#include "catopt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace catopt {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Status status_from_string(const std::string& s) {
  if (s == "converged") return Status::converged;
  if (s == "iteration_limit") return Status::iteration_limit;
  if (s == "numerical_failure") return Status::numerical_failure;
  throw ParameterError("unknown status: " + s);
}

// Order-independent geometric mean: sort before accumulating logs.
double geomean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

}  // namespace

SolverSpec make_solver_spec(const std::string& name) {
  SolverSpec spec;
  spec.name = name;
  if (name == "cat") {
    spec.kind = SolverKind::cat;
  } else if (name == "cat_theta0") {
    spec.kind = SolverKind::cat_theta0;
    spec.cat.theta = 0.0;
  } else if (name == "classic") {
    spec.kind = SolverKind::classic;
  } else {
    throw ParameterError("unknown solver: " + name +
                         " (expected cat, cat_theta0 or classic)");
  }
  return spec;
}

std::vector<BenchmarkRecord> run_suite(const SuiteSpec& spec) {
  if (spec.problems.empty()) throw ParameterError("run_suite: empty problem list");
  if (spec.solvers.empty()) throw ParameterError("run_suite: empty solver list");
  if (!(spec.eps > 0.0)) throw ParameterError("run_suite: eps must be positive");
  if (spec.max_iter < 1) throw ParameterError("run_suite: max_iter must be positive");

  std::vector<const ProblemInstance*> problems;
  for (const ProblemInstance& p : spec.problems) problems.push_back(&p);
  std::sort(problems.begin(), problems.end(),
            [](const ProblemInstance* a, const ProblemInstance* b) {
              return a->label < b->label;
            });
  std::vector<SolverSpec> solvers = spec.solvers;
  std::sort(solvers.begin(), solvers.end(),
            [](const SolverSpec& a, const SolverSpec& b) { return a.name < b.name; });
  for (std::size_t i = 0; i + 1 < solvers.size(); ++i) {
    if (solvers[i].name == solvers[i + 1].name) {
      throw ParameterError("run_suite: duplicate solver name " + solvers[i].name);
    }
  }
  for (std::size_t i = 0; i + 1 < problems.size(); ++i) {
    if (problems[i]->label == problems[i + 1]->label) {
      throw ParameterError("run_suite: duplicate problem label " + problems[i]->label);
    }
  }
  for (SolverSpec& solver : solvers) {
    solver.cat.eps = spec.eps;
    solver.cat.max_iter = spec.max_iter;
    solver.classic.eps = spec.eps;
    solver.classic.max_iter = spec.max_iter;
    if (solver.kind == SolverKind::classic) {
      validate_config(solver.classic);
    } else {
      validate_config(solver.cat);
    }
  }

  std::vector<BenchmarkRecord> records;
  for (const ProblemInstance* problem : problems) {
    for (const SolverSpec& solver : solvers) {
      BenchmarkRecord rec;
      rec.problem = problem->label;
      rec.solver = solver.name;
      rec.max_iter = spec.max_iter;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        SolveResult run;
        TraceAudit audit;
        if (solver.kind == SolverKind::classic) {
          run = classic_minimize(*problem->problem, problem->start, solver.classic);
          audit = audit_classic_trace(run.trace, solver.classic);
        } else {
          run = minimize(*problem->problem, problem->start, solver.cat);
          audit = audit_cat_trace(run.trace, solver.cat);
        }
        rec.status = run.status;
        rec.iters = run.iterations;
        if (!run.trace.records.empty()) {
          const IterationRecord& last = run.trace.records.back();
          rec.fevals = last.fevals;
          rec.gevals = last.gevals;
          rec.hevals = last.hevals;
        }
        rec.final_grad_norm = problem->problem->gradient(run.x_final).norm();
        if (problem->f_star) {
          rec.optimality_gap = problem->problem->value(run.x_final) - *problem->f_star;
        }
        rec.certificate_violations = audit.certificate_violations;
        rec.invariant_violations =
            audit.descent_violations + audit.radius_law_violations;
      } catch (const std::exception&) {
        rec.status = Status::numerical_failure;
      }
      const auto t1 = std::chrono::steady_clock::now();
      rec.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
      records.push_back(std::move(rec));
    }
  }
  return records;
}

double geometric_mean_iters(const std::vector<BenchmarkRecord>& records, int cap) {
  if (cap < 1) throw ParameterError("geometric_mean_iters: cap must be positive");
  if (records.empty()) throw ParameterError("geometric_mean_iters: empty record list");
  std::vector<double> counts;
  counts.reserve(records.size());
  for (const BenchmarkRecord& rec : records) {
    counts.push_back(rec.status == Status::converged ? rec.iters : cap);
  }
  return geomean(std::move(counts));
}

std::vector<SolverSummary> summarize(const std::vector<BenchmarkRecord>& records) {
  std::map<std::string, std::vector<const BenchmarkRecord*>> by_solver;
  for (const BenchmarkRecord& rec : records) by_solver[rec.solver].push_back(&rec);

  std::vector<SolverSummary> out;
  for (const auto& [solver, recs] : by_solver) {
    SolverSummary s;
    s.solver = solver;
    s.problems = static_cast<int>(recs.size());
    std::vector<double> iters, fevals, gevals;
    for (const BenchmarkRecord* rec : recs) {
      const bool ok = rec->status == Status::converged;
      if (!ok) ++s.failures;
      iters.push_back(ok ? rec->iters : rec->max_iter);
      fevals.push_back(ok ? rec->fevals : rec->max_iter);
      gevals.push_back(ok ? rec->gevals : rec->max_iter);
    }
    s.geomean_iters = geomean(std::move(iters));
    s.geomean_fevals = geomean(std::move(fevals));
    s.geomean_gevals = geomean(std::move(gevals));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ProfileCurve> performance_profile(const std::vector<BenchmarkRecord>& records,
                                              const std::vector<int>& iter_grid) {
  std::map<std::string, std::set<std::string>> problems_of;
  for (const BenchmarkRecord& rec : records) problems_of[rec.solver].insert(rec.problem);
  if (problems_of.empty()) throw ParameterError("performance_profile: no records");

  const std::set<std::string>& reference = problems_of.begin()->second;
  for (const auto& [solver, probs] : problems_of) {
    if (probs == reference) continue;
    std::string diff;
    for (const std::string& p : probs) {
      if (!reference.count(p)) diff += " +" + p;
    }
    for (const std::string& p : reference) {
      if (!probs.count(p)) diff += " -" + p;
    }
    throw ParameterError("performance_profile: problem sets differ for solver " +
                         solver + ":" + diff);
  }

  std::vector<ProfileCurve> curves;
  for (const auto& [solver, probs] : problems_of) {
    ProfileCurve curve;
    curve.solver = solver;
    const double total = static_cast<double>(probs.size());
    for (int t : iter_grid) {
      int solved = 0;
      for (const BenchmarkRecord& rec : records) {
        if (rec.solver == solver && rec.status == Status::converged && rec.iters <= t) {
          ++solved;
        }
      }
      curve.points.emplace_back(t, solved / total);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<int> default_iter_grid(int max) {
  std::vector<int> grid;
  double t = 1.0;
  while (t < max) {
    const int ti = static_cast<int>(t);
    if (grid.empty() || grid.back() != ti) grid.push_back(ti);
    t *= 1.25;
  }
  if (grid.empty() || grid.back() != max) grid.push_back(max);
  return grid;
}

void write_records_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << "problem,solver,status,iters,fevals,gevals,hevals,final_grad_norm,"
         "wall_time_seconds,optimality_gap,max_iter,certificate_violations,"
         "invariant_violations\n";
  for (const BenchmarkRecord& rec : records) {
    out << rec.problem << ',' << rec.solver << ',' << to_string(rec.status) << ','
        << rec.iters << ',' << rec.fevals << ',' << rec.gevals << ',' << rec.hevals
        << ',' << fmt17(rec.final_grad_norm) << ',' << fmt17(rec.wall_time_seconds)
        << ',' << (rec.optimality_gap ? fmt17(*rec.optimality_gap) : std::string())
        << ',' << rec.max_iter << ',' << rec.certificate_violations << ','
        << rec.invariant_violations << '\n';
  }
}

std::vector<BenchmarkRecord> read_records_csv(std::istream& in) {
  std::vector<BenchmarkRecord> records;
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("records csv: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (ss.eof() && !line.empty() && line.back() == ',') fields.push_back("");
    if (fields.size() != 13) throw ParameterError("records csv: malformed row: " + line);
    BenchmarkRecord rec;
    rec.problem = fields[0];
    rec.solver = fields[1];
    rec.status = status_from_string(fields[2]);
    rec.iters = std::stoi(fields[3]);
    rec.fevals = std::stol(fields[4]);
    rec.gevals = std::stol(fields[5]);
    rec.hevals = std::stol(fields[6]);
    rec.final_grad_norm = std::stod(fields[7]);
    rec.wall_time_seconds = std::stod(fields[8]);
    if (!fields[9].empty()) rec.optimality_gap = std::stod(fields[9]);
    rec.max_iter = std::stoi(fields[10]);
    rec.certificate_violations = std::stoi(fields[11]);
    rec.invariant_violations = std::stoi(fields[12]);
    records.push_back(std::move(rec));
  }
  return records;
}

void write_summary_csv(std::ostream& out, const std::vector<SolverSummary>& summaries) {
  out << "solver,problems,failures,geomean_iters,geomean_fevals,geomean_gevals\n";
  for (const SolverSummary& s : summaries) {
    out << s.solver << ',' << s.problems << ',' << s.failures << ','
        << fmt17(s.geomean_iters) << ',' << fmt17(s.geomean_fevals) << ','
        << fmt17(s.geomean_gevals) << '\n';
  }
}

void write_profile_svg(std::ostream& out, const std::vector<ProfileCurve>& curves) {
  const int width = 720, height = 480;
  const int ml = 70, mr = 30, mt = 30, mb = 50;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;
  int t_max = 1;
  for (const ProfileCurve& c : curves) {
    for (const auto& [t, frac] : c.points) t_max = std::max(t_max, t);
  }
  const double log_max = std::log10(static_cast<double>(std::max(t_max, 2)));
  const auto x_of = [&](double t) {
    return ml + plot_w * std::log10(std::max(t, 1.0)) / log_max;
  };
  const auto y_of = [&](double frac) { return mt + plot_h * (1.0 - frac); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + plot_h << "\" stroke=\"black\"/>\n";
  for (double frac = 0.0; frac <= 1.0001; frac += 0.25) {
    const double y = y_of(frac);
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\""
        << y << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << frac << "</text>\n";
  }
  for (int decade = 1; decade <= t_max; decade *= 10) {
    const double x = x_of(decade);
    out << "<line x1=\"" << x << "\" y1=\"" << mt + plot_h << "\" x2=\"" << x
        << "\" y2=\"" << mt + plot_h + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << mt + plot_h + 18
        << "\" font-size=\"12\" text-anchor=\"middle\">" << decade << "</text>\n";
  }
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">iterations</text>\n";
  out << "<text x=\"16\" y=\"" << mt + plot_h / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << mt + plot_h / 2 << ")\">fraction solved</text>\n";

  int color_idx = 0;
  int legend_y = mt + 16;
  for (const ProfileCurve& curve : curves) {
    const char* color = colors[color_idx % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [t, frac] : curve.points) {
      out << x_of(t) << ',' << y_of(frac) << ' ';
    }
    out << "\"/>\n";
    out << "<line x1=\"" << ml + 12 << "\" y1=\"" << legend_y << "\" x2=\"" << ml + 36
        << "\" y2=\"" << legend_y << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + 42 << "\" y=\"" << legend_y + 4 << "\" font-size=\"12\">"
        << curve.solver << "</text>\n";
    legend_y += 18;
    ++color_idx;
  }
  out << "</svg>\n";
}

std::vector<std::string> emit_reports(const std::vector<BenchmarkRecord>& records,
                                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  std::vector<std::string> written;
  const auto open = [&](const std::string& name) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    written.push_back(path);
    return out;
  };

  {
    auto out = open("records.csv");
    write_records_csv(out, records);
  }
  {
    auto out = open("summary.csv");
    write_summary_csv(out, summarize(records));
  }
  int cap = 1;
  for (const BenchmarkRecord& rec : records) cap = std::max(cap, rec.max_iter);
  const std::vector<int> grid = default_iter_grid(cap);
  const std::vector<ProfileCurve> curves = performance_profile(records, grid);
  for (const ProfileCurve& curve : curves) {
    auto out = open("profile_" + curve.solver + ".csv");
    out << "t,fraction\n";
    for (const auto& [t, frac] : curve.points) out << t << ',' << fmt17(frac) << '\n';
  }
  {
    auto out = open("profiles.svg");
    write_profile_svg(out, curves);
  }
  return written;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

void apply_solver_key(SolverSpec& solver, const std::string& key, const std::string& value) {
  const double v = std::stod(value);
  if (key == "r1") {
    solver.cat.r1 = v;
    solver.classic.r1 = v;
  } else if (key == "beta") {
    solver.cat.beta = v;
    solver.classic.beta = v;
  } else if (key == "omega") {
    solver.cat.omega = v;
    solver.classic.omega = v;
  } else if (key == "theta") {
    solver.cat.theta = v;
  } else if (key == "gamma1") {
    solver.cat.gamma1 = v;
  } else if (key == "gamma2") {
    solver.cat.gamma2 = v;
  } else if (key == "gamma3") {
    solver.cat.gamma3 = v;
  } else if (key == "accept_eta") {
    solver.classic.accept_eta = v;
  } else {
    throw ParameterError("suite: unknown solver key " + key);
  }
}

}  // namespace

SuiteSpec parse_suite(std::istream& in) {
  SuiteSpec suite;
  std::string line;
  enum class Section { top, solver, problem };
  Section section = Section::top;
  ProblemSpec problem;
  std::string problem_label;
  std::pair<long, long> seeds{0, -1};

  const auto flush_problem = [&]() {
    if (section != Section::problem) return;
    if (seeds.second >= seeds.first && seeds.second >= 0) {
      for (long seed = seeds.first; seed <= seeds.second; ++seed) {
        ProblemSpec expanded = problem;
        expanded.set("seed", std::to_string(seed));
        ProblemInstance inst = make_problem(expanded);
        if (!problem_label.empty()) inst.label = problem_label + "_s" + std::to_string(seed);
        suite.problems.push_back(std::move(inst));
      }
    } else {
      ProblemInstance inst = make_problem(problem);
      if (!problem_label.empty()) inst.label = problem_label;
      suite.problems.push_back(std::move(inst));
    }
  };

  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParameterError("suite: malformed section: " + line);
      flush_problem();
      std::istringstream header(line.substr(1, line.size() - 2));
      std::string kind, name;
      header >> kind >> name;
      if (kind == "solver" && !name.empty()) {
        suite.solvers.push_back(make_solver_spec(name));
        section = Section::solver;
      } else if (kind == "problem" && !name.empty()) {
        problem = ProblemSpec{};
        problem.name = name;
        problem_label.clear();
        seeds = {0, -1};
        section = Section::problem;
      } else {
        throw ParameterError("suite: unknown section: " + line);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParameterError("suite: expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParameterError("suite: expected key = value: " + line);
    }

    switch (section) {
      case Section::top:
        if (key == "eps") {
          suite.eps = std::stod(value);
        } else if (key == "max_iter") {
          suite.max_iter = std::stoi(value);
        } else {
          throw ParameterError("suite: unknown top-level key " + key);
        }
        break;
      case Section::solver:
        apply_solver_key(suite.solvers.back(), key, value);
        break;
      case Section::problem:
        if (key == "label") {
          problem_label = value;
        } else if (key == "seeds") {
          const auto colon = value.find(':');
          if (colon == std::string::npos) {
            throw ParameterError("suite: seeds expects a:b, got " + value);
          }
          seeds.first = std::stol(value.substr(0, colon));
          seeds.second = std::stol(value.substr(colon + 1));
          if (seeds.second < seeds.first) {
            throw ParameterError("suite: empty seed range " + value);
          }
        } else {
          problem.set(key, value);
        }
        break;
    }
  }
  flush_problem();
  return suite;
}

SuiteSpec parse_suite_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open suite file " + path);
  return parse_suite(in);
}

}  // namespace catopt
