#ifndef BELLGEO_OPTIMIZE_HPP_
#define BELLGEO_OPTIMIZE_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bellgeo/cglmp.hpp"
#include "bellgeo/common.hpp"
#include "bellgeo/qstate.hpp"
#include "bellgeo/rng.hpp"
#include "bellgeo/uparam.hpp"

namespace bellgeo {

struct OptimizerConfig {
  int restarts = 20;
  int max_iterations = 5000;
  double f_tolerance = 1e-10;
  double x_tolerance = 1e-10;
  std::uint64_t seed = 1;
  double initial_step = 0.4;  // radians
  int threads = 1;            // worker pool size for scans
};

struct MaxBellResult {
  double value = 0.0;
  MeasurementSettings settings;
  int restarts_used = 0;
  bool converged = false;
};

// ---------------------------------------------------------------------------
// Nelder-Mead
// ---------------------------------------------------------------------------

// Standard reflection/expansion/contraction/shrink simplex minimizer.
// Terminates when the simplex f-spread drops below f_tolerance and the
// vertex spread below x_tolerance, or at the iteration cap. `converged`
// (if given) reports which. Deterministic for a fixed start.
inline std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& x0, const OptimizerConfig& cfg,
    bool* converged = nullptr) {
  const std::size_t n = x0.size();
  const double alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;

  auto eval = [&](const std::vector<double>& x) {
    const double f = objective(x);
    if (!std::isfinite(f))
      throw optimizer_abort("nelder_mead: non-finite objective value");
    return f;
  };

  std::vector<std::vector<double>> xs(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += cfg.initial_step;
  std::vector<double> fs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

  std::vector<std::size_t> order(n + 1);
  bool done = false;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t lo = order[0], hi = order[n], nh = order[n - 1];

    double xspread = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        xspread = std::max(xspread, std::abs(xs[i][j] - xs[lo][j]));
    if (fs[hi] - fs[lo] < cfg.f_tolerance && xspread < cfg.x_tolerance) {
      done = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == hi) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += xs[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = centroid[j] + t * (centroid[j] - xs[hi][j]);
      return x;
    };

    std::vector<double> xr = blend(alpha);
    const double fr = eval(xr);
    if (fr < fs[lo]) {
      std::vector<double> xe = blend(gamma);
      const double fe = eval(xe);
      if (fe < fr) {
        xs[hi] = std::move(xe);
        fs[hi] = fe;
      } else {
        xs[hi] = std::move(xr);
        fs[hi] = fr;
      }
    } else if (fr < fs[nh]) {
      xs[hi] = std::move(xr);
      fs[hi] = fr;
    } else {
      // contraction: outside if the reflected point improved on the worst
      const bool outside = fr < fs[hi];
      std::vector<double> xc = blend(outside ? alpha * beta : -beta);
      const double fc = eval(xc);
      if (fc < std::min(fr, fs[hi])) {
        xs[hi] = std::move(xc);
        fs[hi] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == lo) continue;
          for (std::size_t j = 0; j < n; ++j)
            xs[i][j] = xs[lo][j] + delta * (xs[i][j] - xs[lo][j]);
          fs[i] = eval(xs[i]);
        }
      }
    }
  }
  if (converged) *converged = done;

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fs[i] < fs[best]) best = i;
  return {xs[best], fs[best]};
}

// ---------------------------------------------------------------------------
// Bell maximization
// ---------------------------------------------------------------------------

namespace detail {

inline MeasurementSettings unpack_settings(int d,
                                           const std::vector<double>& x) {
  const int nper = parameter_count(d, UForm::Reduced);
  MeasurementSettings s;
  s.d = d;
  ParamMatrix* ps[4] = {&s.a1, &s.a2, &s.b1, &s.b2};
  for (int i = 0; i < 4; ++i)
    *ps[i] = unpack_reduced(
        d, std::span<const double>(x.data() + i * nper, nper));
  return s;
}

// Random start inside the canonical parameter box: rotations in [0, pi/2],
// phases in [0, 2 pi).
inline std::vector<double> random_settings_start(int d, int blocks, Rng& rng) {
  const int nper = parameter_count(d, UForm::Reduced);
  std::vector<double> x(static_cast<std::size_t>(blocks) * nper);
  for (std::size_t i = 0; i < x.size(); i += 2) {
    x[i] = rng.uniform(0.0, kPi / 2);
    x[i + 1] = rng.uniform(0.0, kTwoPi);
  }
  return x;
}

inline std::vector<double> wrap_params(std::vector<double> x) {
  for (double& v : x) v = detail::wrap_two_pi(v);
  return x;
}

inline std::vector<double> numerical_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

// BFGS with Armijo backtracking on numerical gradients. Nelder-Mead creeps
// along the nearly flat ridge of the Bell objective once it is close; this
// polish stage restores fast local convergence. Deterministic.
inline double bfgs_polish(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double>& x, int max_iter, bool* converged = nullptr) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> hess_inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) hess_inv[i][i] = 1.0;
  double fx = f(x);
  if (!std::isfinite(fx))
    throw optimizer_abort("bfgs_polish: non-finite objective value");
  std::vector<double> g = numerical_gradient(f, x);
  bool done = false;

  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p[i] -= hess_inv[i][j] * g[j];
    double slope = 0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * p[i];
    if (slope > 0) {  // curvature bookkeeping went bad: reset to descent
      for (auto& row : hess_inv) std::fill(row.begin(), row.end(), 0.0);
      slope = 0;
      for (std::size_t i = 0; i < n; ++i) {
        hess_inv[i][i] = 1.0;
        p[i] = -g[i];
        slope -= g[i] * g[i];
      }
    }

    double t = 1.0, fn = 0.0;
    std::vector<double> xn(n);
    int ls = 0;
    for (; ls < 40; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + t * p[i];
      fn = f(xn);
      if (!std::isfinite(fn))
        throw optimizer_abort("bfgs_polish: non-finite objective value");
      if (fn <= fx + 1e-4 * t * slope) break;
      t *= 0.5;
    }
    if (ls == 40) {  // no acceptable step: gradient noise floor reached
      done = true;
      break;
    }

    const std::vector<double> gn = numerical_gradient(f, xn);
    std::vector<double> s(n), y(n);
    double sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
      sy += s[i] * y[i];
    }
    const double df = fx - fn;
    x = xn;
    fx = fn;
    g = gn;
    if (sy > 1e-14) {
      const double rho = 1.0 / sy;
      std::vector<double> hy(n, 0.0);
      double yhy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += hess_inv[i][j] * y[j];
        yhy += y[i] * hy[i];
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          hess_inv[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) +
                            rho * (rho * yhy + 1.0) * s[i] * s[j];
    }
    double gmax = 0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < 1e-9 && df < 1e-14) {
      done = true;
      break;
    }
  }
  if (converged) *converged = done;
  return fx;
}

}  // namespace detail

// Maximize I_d = Tr(B rho) over the 4(d^2-d) Reduced parameters of the four
// observables, best of cfg.restarts random starts. The objective is exactly
// 2 pi periodic in every parameter, so the search runs unconstrained on raw
// parameters; the returned settings are wrapped mod 2 pi (an exact symmetry
// of the objective, so MaxBellResult.value is the objective at the returned
// settings).
inline MaxBellResult maximize_bell(const CMatrix& rho, int d,
                                   const OptimizerConfig& cfg) {
  if (rho.rows() != d * d || rho.cols() != d * d)
    throw dimension_mismatch("maximize_bell: dim(rho) != d^2");
  auto objective = [&](const std::vector<double>& x) {
    return -cglmp_value(rho, detail::unpack_settings(d, x));
  };

  Rng rng(cfg.seed);
  MaxBellResult result;
  result.value = -1e300;
  for (int r = 0; r < cfg.restarts; ++r) {
    const std::vector<double> x0 = detail::random_settings_start(d, 4, rng);
    bool converged = false;
    auto [x, f] = nelder_mead(objective, x0, cfg, &converged);
    bool polished = false;
    f = detail::bfgs_polish(objective, x, 400, &polished);
    converged = converged || polished;
    if (-f > result.value) {
      result.value = -f;
      result.settings = detail::unpack_settings(d, detail::wrap_params(x));
      result.converged = converged;
    }
    ++result.restarts_used;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Violation boundary
// ---------------------------------------------------------------------------

// Noise weight nu* at which rho(nu) = (1-nu)/d^2 1 + nu tau stops violating
// CGLMP: since Tr(B) = 0, max I(rho(nu)) = nu max I(tau), so nu* =
// 2 / max I(tau). Values > 1 mean tau itself does not violate.
inline double violation_boundary_nu(const CMatrix& tau, int d,
                                    const OptimizerConfig& cfg) {
  const MaxBellResult r = maximize_bell(tau, d, cfg);
  if (r.value <= 2e-12)
    throw no_violation_direction(
        "violation_boundary_nu: tau has no CGLMP violation direction");
  return 2.0 / r.value;
}

// Secant/bisection fallback for families that are not identity-mixed:
// solves max I((1-t) rho0 + t rho1) = 2 for t in [0, 1] to x_accuracy.
// Requires a sign change of (max I - 2) across the segment.
inline double violation_boundary_bisect(const CMatrix& rho0,
                                        const CMatrix& rho1, int d,
                                        const OptimizerConfig& cfg,
                                        double x_accuracy = 1e-6) {
  auto margin = [&](double t) {
    const CMatrix rho = (1.0 - t) * rho0 + t * rho1;
    return maximize_bell(rho, d, cfg).value - 2.0;
  };
  double a = 0.0, b = 1.0, fa = margin(a), fb = margin(b);
  if (fa * fb > 0)
    throw no_violation_direction(
        "violation_boundary_bisect: no sign change of max I - 2 on the "
        "segment");
  while (b - a > x_accuracy) {
    // secant proposal, safeguarded by bisection
    double t = (fb != fa) ? a - fa * (b - a) / (fb - fa) : 0.5 * (a + b);
    const double mid = 0.5 * (a + b);
    if (!(t > a && t < b)) t = mid;
    // keep the bracket shrinking geometrically
    if (std::min(t - a, b - t) < 0.1 * (b - a)) t = mid;
    const double ft = margin(t);
    if (fa * ft <= 0) {
      b = t;
      fb = ft;
    } else {
      a = t;
      fa = ft;
    }
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Boundary scans
// ---------------------------------------------------------------------------

struct BoundaryPoint {
  std::vector<double> tau_params;       // family coordinates of tau
  std::vector<double> boundary_params;  // nu* times tau_params (if solved)
  std::optional<double> nu;             // empty: no violation direction
  double max_value = 0.0;               // max I_d(tau), 0 on error
  std::string error;                    // empty on success
};

// Solve the CGLMP boundary along the noise ray of each tau. Points are
// processed by a worker pool but emitted in input order; each point draws
// its seed from (cfg.seed, index) so the output is schedule-independent.
inline std::vector<BoundaryPoint> scan_boundary(
    StateFamily family, const std::vector<std::vector<double>>& tau_params,
    int d, const OptimizerConfig& cfg) {
  std::vector<BoundaryPoint> out(tau_params.size());
  auto run_point = [&](std::size_t i) {
    BoundaryPoint& p = out[i];
    p.tau_params = tau_params[i];
    try {
      const CMatrix tau = family_state(family, tau_params[i], d);
      OptimizerConfig point_cfg = cfg;
      point_cfg.seed = derive_seed(cfg.seed, i);
      const MaxBellResult r = maximize_bell(tau, d, point_cfg);
      p.max_value = r.value;
      if (r.value <= 2e-12) {
        p.error = "no violation direction";
        return;
      }
      const double nu = 2.0 / r.value;
      p.nu = nu;
      p.boundary_params = tau_params[i];
      for (double& c : p.boundary_params) c *= nu;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || tau_params.size() < 2) {
    for (std::size_t i = 0; i < tau_params.size(); ++i) run_point(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tau_params.size(); i = next++)
        run_point(i);
    });
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace bellgeo

#endif  // BELLGEO_OPTIMIZE_HPP_
