// Batch CLI: Bell maximization, boundary solving, state classification,
// concurrence bounds, grid scans, and verification suites.
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bellgeo/bellgeo.hpp"

namespace {

using namespace bellgeo;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalAbort = 3;

struct GlobalOpts {
  OptimizerConfig cfg;
  std::string output;
  std::string format = "csv";
  std::string config_file;
};

void apply_config_file(GlobalOpts& g) {
  if (g.config_file.empty()) return;
  std::ifstream f(g.config_file);
  if (!f) throw CLI::ValidationError("config", "cannot open " + g.config_file);
  nlohmann::json j;
  f >> j;
  optimizer_config_from_json(j, g.cfg);
  if (j.contains("output")) g.output = j["output"].get<std::string>();
  if (j.contains("format")) g.format = j["format"].get<std::string>();
}

StateFamily parse_family_or_throw(const std::string& name) {
  StateFamily f;
  if (!parse_family(name, f))
    throw CLI::ValidationError("family", "unknown family: " + name);
  return f;
}

CMatrix load_state(const std::string& family, const std::vector<double>& params,
                   const std::string& state_file, int& d) {
  if (!state_file.empty()) {
    std::ifstream f(state_file);
    if (!f)
      throw CLI::ValidationError("state", "cannot open " + state_file);
    nlohmann::json j;
    f >> j;
    const CMatrix rho = matrix_from_json(j);
    const int dim = static_cast<int>(rho.rows());
    d = 0;
    for (int k = 2; k * k <= dim; ++k)
      if (k * k == dim) d = k;
    if (d == 0)
      throw CLI::ValidationError("state", "matrix dimension is not d^2");
    return rho;
  }
  const StateFamily fam = parse_family_or_throw(family);
  d = family_local_dim(fam);
  return family_state(fam, params, d);
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

struct VerifyRow {
  std::string name;
  double expected, computed, tolerance;
  bool pass() const { return std::abs(expected - computed) <= tolerance; }
};

int print_verify(const std::vector<VerifyRow>& rows) {
  bool all = true;
  std::printf("%-36s %16s %16s %10s  %s\n", "check", "expected", "computed",
              "tolerance", "status");
  for (const auto& r : rows) {
    const bool p = r.pass();
    all = all && p;
    std::printf("%-36s %16.8f %16.8f %10.1e  %s\n", r.name.c_str(), r.expected,
                r.computed, r.tolerance, p ? "ok" : "FAIL");
  }
  return all ? kExitOk : kExitVerifyFail;
}

int verify_analytic_max(const GlobalOpts& g, int dmax) {
  std::vector<VerifyRow> rows;
  for (int d = 2; d <= dmax; ++d) {
    OptimizerConfig cfg = g.cfg;
    cfg.seed = derive_seed(g.cfg.seed, d);
    const MaxBellResult r = maximize_bell(bell_projector(d, 0, 0), d, cfg);
    rows.push_back({"max I_" + std::to_string(d) + " on P00",
                    cglmp_analytic_max(d), r.value, 1e-5});
  }
  return print_verify(rows);
}

int verify_local_bound(const GlobalOpts& g) {
  std::vector<VerifyRow> rows;
  for (int d : {2, 3, 4})
    rows.push_back({"brute-force local bound d=" + std::to_string(d), 2.0,
                    local_bound_bruteforce(d), 0.0});
  // random product states can reach but never exceed the local bound
  Rng rng(g.cfg.seed ^ 0x70726f64ULL);
  const int d = 3;
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    ParamMatrix pa = ParamMatrix::zero(d), pb = ParamMatrix::zero(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        pa.lambda(i, j) = rng.uniform(0, kTwoPi);
        pb.lambda(i, j) = rng.uniform(0, kTwoPi);
      }
    const CVector va = composite_unitary(pa, UForm::Full).col(0);
    const CVector vb = composite_unitary(pb, UForm::Full).col(0);
    const CMatrix rho =
        tensor(CMatrix(va * va.adjoint()), CMatrix(vb * vb.adjoint()));
    OptimizerConfig cfg = g.cfg;
    cfg.restarts = std::min(g.cfg.restarts, 2);
    cfg.max_iterations = std::min(g.cfg.max_iterations, 800);
    cfg.seed = derive_seed(g.cfg.seed, 1000 + t);
    worst = std::max(worst, maximize_bell(rho, d, cfg).value);
  }
  rows.push_back({"max over 500 product states <= 2", 2.0,
                  std::max(worst, 2.0 - 1e-6), 1e-6});
  return print_verify(rows);
}

int verify_horodecki(const GlobalOpts& g) {
  Rng rng(g.cfg.seed ^ 0x686f726fULL);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    double c1, c2, c3;
    do {
      c1 = rng.uniform(-1, 1);
      c2 = rng.uniform(-1, 1);
      c3 = rng.uniform(-1, 1);
    } while (boundary_value(StateFamily::Tetra2, BoundaryKind::Positivity,
                            {c1, c2, c3}) < 0);
    const CMatrix rho = family_state(StateFamily::Tetra2, {c1, c2, c3}, 2);
    OptimizerConfig cfg = g.cfg;
    cfg.seed = derive_seed(g.cfg.seed, 2000 + t);
    const double num = maximize_bell(rho, 2, cfg).value;
    worst = std::max(worst, std::abs(num - chsh_horodecki_max(c1, c2, c3)));
  }
  return print_verify(
      {{"max |numeric - Horodecki| (100 states)", 0.0, worst, 1e-5}});
}

int verify_line_concurrence(const GlobalOpts& g, double step, double tol) {
  double worst = 0.0;
  double worst_a = 0, worst_b = 0;
  int points = 0;
  std::size_t idx = 0;
  for (double a = -1.0 / 6; a <= 1.0 + 1e-9; a += step)
    for (double b = -1.0 / 3; b <= 1.0 + 1e-9; b += step) {
      ++idx;
      const std::vector<double> w =
          boundary_values(StateFamily::Line, BoundaryKind::Positivity,
                          {a, b / 2, b / 2});
      if (*std::min_element(w.begin(), w.end()) < -1e-12) continue;
      ++points;
      const CMatrix rho = family_state(StateFamily::Line, {a, b / 2, b / 2}, 3);
      OptimizerConfig cfg = g.cfg;
      cfg.seed = derive_seed(g.cfg.seed, 3000 + idx);
      const double lb = m_concurrence_lower_bound(rho, 3, cfg).lower_bound;
      const double an = m_concurrence_line_analytic(a, b);
      if (std::abs(lb - an) > worst) {
        worst = std::abs(lb - an);
        worst_a = a;
        worst_b = b;
      }
    }
  std::printf("grid points inside positivity triangle: %d\n", points);
  std::printf("worst deviation at (alpha, beta) = (%g, %g)\n", worst_a,
              worst_b);
  return print_verify(
      {{"max |optimized lb - analytic|", 0.0, worst, tol}});
}

int verify_sphere_fit(const GlobalOpts& g, int npoints) {
  // boundary points of the line family in the all-positive octant
  Rng rng(g.cfg.seed ^ 0x73706872ULL);
  std::vector<std::vector<double>> taus;
  for (int t = 0; t < npoints; ++t) {
    // random positive direction on the simplex cap of the line family
    double a, b, c;
    do {
      a = rng.uniform(0, 1);
      b = rng.uniform(0, 1);
      c = rng.uniform(0, 1);
    } while (a + b + c <= 1e-3);
    // scale to the positivity boundary along the ray
    const double scale = [&] {
      double lo = 0, hi = 3;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        const std::vector<double> w =
            boundary_values(StateFamily::Line, BoundaryKind::Positivity,
                            {mid * a, mid * b, mid * c});
        (*std::min_element(w.begin(), w.end()) >= 0 ? lo : hi) = mid;
      }
      return lo;
    }();
    taus.push_back({scale * a, scale * b, scale * c});
  }
  OptimizerConfig cfg = g.cfg;
  const std::vector<BoundaryPoint> pts =
      scan_boundary(StateFamily::Line, taus, 3, cfg);
  const double r = cglmp_sphere_radius(), c = cglmp_sphere_center();
  double worst = 0.0;
  int solved = 0;
  for (const auto& p : pts) {
    if (!p.nu) continue;
    ++solved;
    double dist2 = 0;
    for (double x : p.boundary_params) dist2 += (x - c) * (x - c);
    worst = std::max(worst, std::abs(std::sqrt(dist2) - r));
  }
  std::printf("solved boundary points: %d / %d\n", solved, npoints);
  return print_verify({{"max |dist(center) - r|", 0.0, worst, 1e-3}});
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

unsigned parse_tasks(const std::vector<std::string>& names) {
  unsigned t = 0;
  for (const auto& n : names) {
    if (n == "positivity") t |= static_cast<unsigned>(ScanTask::Positivity);
    else if (n == "ppt") t |= static_cast<unsigned>(ScanTask::Ppt);
    else if (n == "witness") t |= static_cast<unsigned>(ScanTask::Witness);
    else if (n == "cglmp") t |= static_cast<unsigned>(ScanTask::Cglmp);
    else if (n == "concurrence")
      t |= static_cast<unsigned>(ScanTask::Concurrence);
    else
      throw CLI::ValidationError("tasks", "unknown task: " + n);
  }
  return t;
}

ScanAxis parse_axis(const std::string& s) {
  ScanAxis a;
  char colon1 = 0, colon2 = 0;
  std::istringstream in(s);
  if (!(in >> a.lo >> colon1 >> a.hi >> colon2 >> a.n) || colon1 != ':' ||
      colon2 != ':')
    throw CLI::ValidationError("grid", "axis must be lo:hi:n, got " + s);
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CGLMP-Bell maximization and qudit state-space geometry"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.cfg.seed, "global RNG seed");
  app.add_option("--restarts", g.cfg.restarts, "optimizer restarts");
  double tol = 0.0;
  auto* tol_opt =
      app.add_option("--tol", tol, "optimizer f/x tolerance (single knob)");
  app.add_option("--threads", g.cfg.threads, "scan worker threads");
  app.add_option("--output", g.output, "output path");
  app.add_option("--format", g.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", g.config_file,
                 "JSON config file (flags override)");
  app.add_option("--max-iterations", g.cfg.max_iterations,
                 "optimizer iteration cap");

  std::string family, state_file, job_file, suite;
  std::vector<double> params;
  std::vector<std::string> grid_spec, task_names;
  int dflag = 0, dmax = 4, npoints = 100;
  double step = 0.02, conc_tol = 1e-4;

  auto* cmd_max = app.add_subcommand("max-bell", "maximize I_d over settings");
  cmd_max->add_option("--family", family, "state family name");
  cmd_max->add_option("--params", params, "family parameters")->delimiter(',');
  cmd_max->add_option("--state", state_file, "density matrix JSON file");
  cmd_max->add_option("--d", dflag, "local dimension (informational)");

  auto* cmd_boundary =
      app.add_subcommand("boundary", "solve the noise weight nu* for tau");
  cmd_boundary->add_option("--family", family)->required();
  cmd_boundary->add_option("--params", params)->delimiter(',')->required();

  auto* cmd_classify =
      app.add_subcommand("classify", "positivity/PPT/witness/CGLMP report");
  cmd_classify->add_option("--family", family)->required();
  cmd_classify->add_option("--params", params)->delimiter(',')->required();

  auto* cmd_conc =
      app.add_subcommand("concurrence", "m-concurrence lower bound");
  cmd_conc->add_option("--family", family);
  cmd_conc->add_option("--params", params)->delimiter(',');
  cmd_conc->add_option("--state", state_file, "density matrix JSON file");

  auto* cmd_scan = app.add_subcommand("scan", "grid scan to CSV/JSON dataset");
  cmd_scan->add_option("--job", job_file, "scan job JSON file");
  cmd_scan->add_option("--family", family);
  cmd_scan->add_option("--grid", grid_spec,
                       "axis as lo:hi:n (repeat per axis)");
  cmd_scan->add_option("--tasks", task_names,
                       "positivity,ppt,witness,cglmp,concurrence")
      ->delimiter(',');

  auto* cmd_verify = app.add_subcommand("verify", "acceptance check suites");
  cmd_verify
      ->add_option("suite", suite,
                   "analytic-max|local-bound|horodecki|line-concurrence|"
                   "sphere-fit")
      ->required();
  cmd_verify->add_option("--dmax", dmax, "largest d for analytic-max");
  cmd_verify->add_option("--step", step, "grid step for line-concurrence");
  cmd_verify->add_option("--conc-tol", conc_tol,
                         "tolerance for line-concurrence");
  cmd_verify->add_option("--points", npoints, "boundary points for sphere-fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    apply_config_file(g);
    if (*tol_opt) {
      g.cfg.f_tolerance = tol;
      g.cfg.x_tolerance = tol;
    }

    if (*cmd_max) {
      int d = 0;
      const CMatrix rho = load_state(family, params, state_file, d);
      const MaxBellResult r = maximize_bell(rho, d, g.cfg);
      std::printf("max I_%d = %.10f\n", d, r.value);
      std::printf("restarts used: %d\nconverged: %s\n", r.restarts_used,
                  r.converged ? "yes" : "no");
      if (!g.output.empty()) {
        std::ofstream f(g.output, std::ios::binary);
        f << settings_to_json(r.settings).dump(2) << '\n';
        std::printf("settings written to %s\n", g.output.c_str());
      }
      return kExitOk;
    }

    if (*cmd_boundary) {
      const StateFamily fam = parse_family_or_throw(family);
      const int d = family_local_dim(fam);
      const CMatrix tau = family_state(fam, params, d);
      const double nu = violation_boundary_nu(tau, d, g.cfg);
      std::printf("nu* = %.10f\n", nu);
      std::printf("boundary point:");
      for (double p : params) std::printf(" %.10f", nu * p);
      std::printf("\n");
      if (nu > 1.0)
        std::printf("note: nu* > 1, tau itself does not violate\n");
      return kExitOk;
    }

    if (*cmd_classify) {
      const StateFamily fam = parse_family_or_throw(family);
      const Classification c = classify(fam, params, g.cfg);
      auto tri = [](TriState t) {
        return t == TriState::Yes ? "yes"
               : t == TriState::No ? "no"
                                   : "n/a";
      };
      nlohmann::json j = {
          {"family", family_name(fam)},
          {"params", params},
          {"positive", c.positive},
          {"min_eig", c.min_eig},
          {"ppt", c.ppt},
          {"ppt_min_eig", c.ppt_min_eig},
          {"witness_separable", tri(c.witness_separable)},
          {"witness_values", c.witness_values},
          {"bound_entangled", c.bound_entangled},
          {"cglmp_violating", tri(c.cglmp_violating)},
          {"cglmp_margin", c.cglmp_margin},
      };
      if (!c.cglmp_error.empty()) j["cglmp_error"] = c.cglmp_error;
      std::cout << j.dump(2) << '\n';
      return kExitOk;
    }

    if (*cmd_conc) {
      int d = 0;
      const CMatrix rho = load_state(family, params, state_file, d);
      const ConcurrenceResult r = m_concurrence_lower_bound(rho, d, g.cfg);
      std::printf("raw bound      = %.10f\n", r.raw_bound);
      std::printf("optimized C_m^2 lower bound = %.10f\n", r.lower_bound);
      return kExitOk;
    }

    if (*cmd_scan) {
      ScanJob job;
      job.optimizer = g.cfg;
      if (!job_file.empty()) {
        std::ifstream f(job_file);
        if (!f)
          throw CLI::ValidationError("job", "cannot open " + job_file);
        nlohmann::json j;
        f >> j;
        job.family = parse_family_or_throw(j.at("family").get<std::string>());
        for (const auto& ax : j.at("grid"))
          job.axes.push_back({ax.at("lo").get<double>(),
                              ax.at("hi").get<double>(),
                              ax.at("n").get<int>()});
        job.tasks = parse_tasks(j.at("tasks").get<std::vector<std::string>>());
        if (j.contains("optimizer"))
          optimizer_config_from_json(j["optimizer"], job.optimizer);
        if (j.contains("output") && g.output.empty())
          g.output = j["output"].get<std::string>();
        if (j.contains("format") && j["format"] == "json")
          job.format = ScanFormat::Json;
      } else {
        job.family = parse_family_or_throw(family);
        for (const auto& s : grid_spec) job.axes.push_back(parse_axis(s));
        job.tasks = parse_tasks(task_names);
      }
      if (g.format == "json") job.format = ScanFormat::Json;
      if (g.output.empty())
        throw CLI::ValidationError("output", "scan requires --output");
      job.output = g.output;
      const auto recs = run_scan_to_file(job);
      std::size_t failures = 0;
      for (const auto& r : recs)
        if (!r.error.empty()) ++failures;
      std::printf("wrote %zu records (%zu failed points) to %s\n", recs.size(),
                  failures, job.output.c_str());
      return kExitOk;
    }

    if (*cmd_verify) {
      if (suite == "analytic-max") return verify_analytic_max(g, dmax);
      if (suite == "local-bound") return verify_local_bound(g);
      if (suite == "horodecki") return verify_horodecki(g);
      if (suite == "line-concurrence")
        return verify_line_concurrence(g, step, conc_tol);
      if (suite == "sphere-fit") return verify_sphere_fit(g, npoints);
      std::fprintf(stderr, "unknown suite: %s\n", suite.c_str());
      return kExitInputError;
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const optimizer_abort& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kExitNumericalAbort;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kExitNumericalAbort;
  } catch (const no_violation_direction& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kExitNumericalAbort;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericalAbort;
  }
  return kExitOk;
}
